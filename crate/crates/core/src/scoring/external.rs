//! External scorer process speaking newline-delimited JSON.
//!
//! The child writes a handshake line as soon as it starts:
//! `{"protocol": 1, "log_base": "2" | "e", "piece_prefix": string | null}`.
//! Requests are `{"id": n, "text": "..."}`; responses are
//! `{"id": n, "tokens": [...], "surprisals": [...]}` or `{"id": n, "error": "..."}`.
//! Responses are matched to requests by id and may arrive in any order.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Scorer, ScoringError, TokenScore};

pub const PROTOCOL_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogBase {
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "e")]
    E,
}

impl LogBase {
    /// Convert a surprisal in this base to bits.
    pub fn to_bits(self, value: f64) -> f64 {
        match self {
            LogBase::Two => value,
            LogBase::E => value / std::f64::consts::LN_2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Handshake {
    pub protocol: u64,
    pub log_base: LogBase,
    #[serde(default)]
    pub piece_prefix: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ExternalConfig {
    pub handshake_timeout: Duration,
    /// Longest wait for any single response; `None` waits forever.
    pub response_timeout: Option<Duration>,
    /// Maximum number of requests in flight.
    pub window: usize,
}

impl Default for ExternalConfig {
    fn default() -> Self {
        Self {
            handshake_timeout: Duration::from_secs(30),
            response_timeout: None,
            window: 32,
        }
    }
}

#[derive(Serialize)]
struct Request<'a> {
    id: u64,
    text: &'a str,
}

#[derive(Deserialize)]
struct Response {
    id: u64,
    #[serde(default)]
    tokens: Option<Vec<String>>,
    #[serde(default)]
    surprisals: Option<Vec<f64>>,
    #[serde(default)]
    error: Option<String>,
}

pub struct ExternalScorer {
    command: Vec<String>,
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<std::io::Result<String>>,
    handshake: Handshake,
    config: ExternalConfig,
    next_id: u64,
}

impl ExternalScorer {
    /// Start the scorer and wait for its handshake.
    pub fn spawn(command: &[String], config: ExternalConfig) -> Result<Self, ScoringError> {
        let (program, args) = command.split_first().ok_or_else(|| ScoringError::Spawn {
            command: String::new(),
            source: std::io::Error::new(std::io::ErrorKind::InvalidInput, "empty command"),
        })?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|source| ScoringError::Spawn {
                command: command.join(" "),
                source,
            })?;
        let stdout = child.stdout.take().expect("stdout piped");
        let stdin = child.stdin.take();
        let (tx, lines) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let stop = line.is_err();
                if tx.send(line).is_err() || stop {
                    break;
                }
            }
        });

        let mut scorer = Self {
            command: command.to_vec(),
            child,
            stdin,
            lines,
            handshake: Handshake {
                protocol: PROTOCOL_VERSION,
                log_base: LogBase::Two,
                piece_prefix: None,
            },
            config,
            next_id: 0,
        };
        scorer.handshake = scorer.read_handshake()?;
        Ok(scorer)
    }

    fn read_handshake(&mut self) -> Result<Handshake, ScoringError> {
        let deadline = Instant::now() + self.config.handshake_timeout;
        loop {
            let wait = deadline.saturating_duration_since(Instant::now());
            let line = match self.lines.recv_timeout(wait) {
                Ok(line) => line?,
                Err(RecvTimeoutError::Timeout) => {
                    return Err(ScoringError::HandshakeTimeout(self.config.handshake_timeout))
                }
                Err(RecvTimeoutError::Disconnected) => {
                    let status = self.child.wait().ok().map(|s| s.to_string());
                    return Err(ScoringError::NoHandshake { status });
                }
            };
            if line.trim().is_empty() {
                continue;
            }
            let value: Value = serde_json::from_str(&line)
                .map_err(|e| ScoringError::BadHandshake(format!("{e}: {line}")))?;
            if let Some(found) = value.get("protocol").and_then(Value::as_u64) {
                if found != PROTOCOL_VERSION {
                    return Err(ScoringError::Version {
                        found,
                        expected: PROTOCOL_VERSION,
                    });
                }
            }
            return serde_json::from_value(value)
                .map_err(|e| ScoringError::BadHandshake(format!("{e}: {line}")));
        }
    }

    pub fn handshake(&self) -> &Handshake {
        &self.handshake
    }

    fn send(&mut self, id: u64, text: &str) -> std::io::Result<()> {
        let stdin = self
            .stdin
            .as_mut()
            .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::BrokenPipe, "stdin closed"))?;
        let mut line = serde_json::to_string(&Request { id, text }).expect("request serializes");
        line.push('\n');
        stdin.write_all(line.as_bytes())?;
        stdin.flush()
    }

    fn recv(&self) -> Result<Option<String>, ScoringError> {
        let received = match self.config.response_timeout {
            Some(t) => self.lines.recv_timeout(t).map_err(|e| match e {
                RecvTimeoutError::Timeout => Some(t),
                RecvTimeoutError::Disconnected => None,
            }),
            None => self.lines.recv().map_err(|_| None),
        };
        match received {
            Ok(line) => Ok(Some(line?)),
            Err(Some(t)) => Err(ScoringError::ResponseTimeout(t)),
            Err(None) => Ok(None),
        }
    }
}

impl Scorer for ExternalScorer {
    fn identity(&self) -> String {
        format!("cmd:{}", self.command.join(" "))
    }

    fn piece_prefix(&self) -> Option<&str> {
        self.handshake.piece_prefix.as_deref().filter(|p| !p.is_empty())
    }

    fn score_batch(&mut self, texts: &[String]) -> Result<Vec<Vec<TokenScore>>, ScoringError> {
        let total = texts.len();
        let mut results: Vec<Option<Vec<TokenScore>>> = vec![None; total];
        let mut in_flight: HashMap<u64, usize> = HashMap::new();
        let mut next = 0usize;
        let mut completed = 0usize;
        let mut last_completed: Option<usize> = None;
        let window = self.config.window.max(1);
        let died = |completed: usize, last: Option<usize>| ScoringError::Died {
            completed,
            total,
            last_completed: last.map(|i| format!("#{i} \"{}\"", texts[i])),
        };

        while completed < total {
            while next < total && in_flight.len() < window {
                let id = self.next_id;
                self.next_id += 1;
                if self.send(id, &texts[next]).is_err() {
                    return Err(died(completed, last_completed));
                }
                in_flight.insert(id, next);
                next += 1;
            }
            let Some(line) = self.recv()? else {
                return Err(died(completed, last_completed));
            };
            if line.trim().is_empty() {
                continue;
            }
            let response: Response =
                serde_json::from_str(&line).map_err(|e| ScoringError::Protocol {
                    sentence: None,
                    message: format!("malformed response ({e}): {line}"),
                })?;
            let index = in_flight
                .remove(&response.id)
                .ok_or_else(|| ScoringError::Protocol {
                    sentence: None,
                    message: format!("response for unknown request id {}", response.id),
                })?;
            let name = format!("#{index} \"{}\"", texts[index]);
            let protocol = |message: String| ScoringError::Protocol {
                sentence: Some(name.clone()),
                message,
            };
            if let Some(error) = response.error {
                return Err(protocol(format!("scorer reported error: {error}")));
            }
            let (Some(tokens), Some(surprisals)) = (response.tokens, response.surprisals) else {
                return Err(protocol("response lacks tokens or surprisals".into()));
            };
            if tokens.len() != surprisals.len() {
                return Err(protocol(format!(
                    "{} surprisals for {} tokens",
                    surprisals.len(),
                    tokens.len()
                )));
            }
            if let Some(bad) = surprisals.iter().find(|s| !s.is_finite() || **s < 0.0) {
                return Err(protocol(format!("invalid surprisal {bad}")));
            }
            let base = self.handshake.log_base;
            results[index] = Some(
                tokens
                    .into_iter()
                    .zip(surprisals)
                    .map(|(token, s)| TokenScore {
                        token,
                        surprisal: base.to_bits(s),
                    })
                    .collect(),
            );
            completed += 1;
            last_completed = Some(index);
        }
        Ok(results.into_iter().map(|r| r.expect("all completed")).collect())
    }
}

impl Drop for ExternalScorer {
    fn drop(&mut self) {
        // closing stdin asks the scorer to exit
        self.stdin.take();
        let deadline = Instant::now() + Duration::from_secs(2);
        while Instant::now() < deadline {
            match self.child.try_wait() {
                Ok(Some(_)) => return,
                Ok(None) => thread::sleep(Duration::from_millis(10)),
                Err(_) => break,
            }
        }
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
