//! Test double for the external scorer protocol. Tokens are whitespace
//! words; a token's surprisal is its length in characters (in bits, before
//! any log-base scaling), which makes expected region totals easy to state.

use std::io::{BufRead, Write};

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Fail {
    None,
    /// Send one surprisal fewer than tokens
    Short,
    /// Exit after answering `--after` requests
    Die,
    /// Exit before the handshake
    Exit,
    /// Announce an unsupported protocol version
    BadVersion,
    /// Never send a handshake
    Silent,
    /// Answer every request with an error
    Error,
}

#[derive(Parser)]
struct Opts {
    #[arg(long, default_value = "2")]
    log_base: String,
    /// Split words longer than three characters into two pieces, the second
    /// carrying this continuation prefix
    #[arg(long)]
    piece_prefix: Option<String>,
    #[arg(long, value_enum, default_value = "none")]
    fail: Fail,
    #[arg(long, default_value_t = 0)]
    after: usize,
    /// Answer requests pairwise in reverse order; an unpaired last request
    /// is answered only at end of input
    #[arg(long)]
    swap: bool,
}

fn tokens(text: &str, prefix: Option<&str>) -> Vec<String> {
    let mut out = Vec::new();
    for word in text.split_whitespace() {
        let chars: Vec<char> = word.chars().collect();
        match prefix {
            Some(p) if chars.len() > 3 => {
                let mid = chars.len() / 2;
                out.push(chars[..mid].iter().collect());
                out.push(format!("{p}{}", chars[mid..].iter().collect::<String>()));
            }
            _ => out.push(word.to_string()),
        }
    }
    out
}

fn main() {
    let opts = Opts::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match opts.fail {
        Fail::Exit => std::process::exit(3),
        Fail::Silent => {
            std::thread::sleep(std::time::Duration::from_secs(60));
            return;
        }
        _ => {}
    }
    let version = if opts.fail == Fail::BadVersion { 99 } else { 1 };
    let handshake = json!({
        "protocol": version,
        "log_base": opts.log_base,
        "piece_prefix": opts.piece_prefix,
    });
    writeln!(out, "{handshake}").unwrap();
    out.flush().unwrap();

    let scale = if opts.log_base == "e" { std::f64::consts::LN_2 } else { 1.0 };
    let mut answered = 0;
    let mut held: Option<String> = None;
    for line in std::io::stdin().lock().lines() {
        let Ok(line) = line else { break };
        if line.trim().is_empty() {
            continue;
        }
        if opts.fail == Fail::Die && answered >= opts.after {
            std::process::exit(4);
        }
        let request: Value = serde_json::from_str(&line).expect("valid request");
        let id = request["id"].clone();
        let text = request["text"].as_str().unwrap_or_default();
        let response = if opts.fail == Fail::Error || text.trim().is_empty() {
            json!({"id": id, "error": "cannot score"})
        } else {
            let toks = tokens(text, opts.piece_prefix.as_deref());
            let mut surprisals: Vec<f64> = toks
                .iter()
                .map(|t| {
                    let bare = opts
                        .piece_prefix
                        .as_deref()
                        .and_then(|p| t.strip_prefix(p))
                        .unwrap_or(t);
                    bare.chars().count() as f64 * scale
                })
                .collect();
            if opts.fail == Fail::Short {
                surprisals.pop();
            }
            json!({"id": id, "tokens": toks, "surprisals": surprisals})
        };
        answered += 1;
        let response = response.to_string();
        if opts.swap {
            match held.take() {
                None => {
                    held = Some(response);
                    continue;
                }
                Some(first) => {
                    writeln!(out, "{response}").unwrap();
                    writeln!(out, "{first}").unwrap();
                }
            }
        } else {
            writeln!(out, "{response}").unwrap();
        }
        out.flush().unwrap();
    }
    if let Some(last) = held {
        writeln!(out, "{last}").unwrap();
    }
}
