mod common;

use std::time::Duration;

use gapscope_core::scoring::{
    score_suite, ExternalConfig, ExternalScorer, LogBase, Scorer, ScoringError,
};

fn spawn(args: &[&str]) -> Result<ExternalScorer, ScoringError> {
    let mut command = vec![common::mock_scorer()];
    command.extend(args.iter().map(|s| s.to_string()));
    ExternalScorer::spawn(
        &command,
        ExternalConfig {
            handshake_timeout: Duration::from_secs(2),
            response_timeout: Some(Duration::from_secs(20)),
            ..ExternalConfig::default()
        },
    )
}

fn texts(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("sentence number {i} here")).collect()
}

#[test]
fn scores_in_bits() {
    let mut s = spawn(&[]).unwrap();
    assert_eq!(s.handshake().log_base, LogBase::Two);
    let out = s.score_batch(&["the big dog".into()]).unwrap();
    let got: Vec<f64> = out[0].iter().map(|t| t.surprisal).collect();
    assert_eq!(got, [3.0, 3.0, 3.0]);
}

#[test]
fn natural_log_scores_are_converted() {
    let mut s = spawn(&["--log-base", "e"]).unwrap();
    assert_eq!(s.handshake().log_base, LogBase::E);
    let out = s.score_batch(&["hello world".into()]).unwrap();
    for t in &out[0] {
        assert!((t.surprisal - 5.0).abs() < 1e-12, "{t:?}");
    }
}

#[test]
fn word_pieces_align_to_regions() {
    let suite = common::filler_gap_suite(3, 4);
    let mut s = spawn(&["--piece-prefix", "##"]).unwrap();
    assert_eq!(s.piece_prefix(), Some("##"));
    let scored = score_suite(&suite, &mut s).unwrap();
    assert_eq!(scored.len(), 16);
    for sentence in &scored {
        // mock surprisal is character count, so each region scores its letters
        let item = suite.items.iter().find(|i| i.item_id == sentence.item_id).unwrap();
        for region in &item.sentences[&sentence.cell].regions {
            let letters = region.text.split_whitespace().map(|w| w.chars().count()).sum::<usize>();
            assert_eq!(sentence.region_surprisals[&region.name], letters as f64, "{}", region.name);
        }
        assert!(sentence.token_scores.iter().any(|t| t.token.starts_with("##")));
        assert!((sentence.total_region_surprisal() - sentence.total_token_surprisal()).abs() < 1e-9);
    }
}

#[test]
fn out_of_order_responses_are_matched_by_id() {
    // even, since the mock only releases a held response once its partner arrives
    let batch = texts(10);
    let mut plain = spawn(&[]).unwrap();
    let mut swapped = spawn(&["--swap"]).unwrap();
    assert_eq!(plain.score_batch(&batch).unwrap(), swapped.score_batch(&batch).unwrap());
}

#[test]
fn short_response_is_a_protocol_error() {
    let mut s = spawn(&["--fail", "short"]).unwrap();
    let err = s.score_batch(&texts(2)).unwrap_err();
    assert!(matches!(err, ScoringError::Protocol { .. }), "{err}");
    assert!(err.to_string().contains("sentence number"), "{err}");
}

#[test]
fn dying_mid_batch_reports_progress() {
    let mut s = spawn(&["--fail", "die", "--after", "3"]).unwrap();
    let err = s.score_batch(&texts(6)).unwrap_err();
    match &err {
        ScoringError::Died { completed, total, .. } => {
            assert_eq!(*total, 6);
            assert!(*completed <= 3, "{err}");
        }
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn handshake_failures() {
    let err = spawn(&["--fail", "bad-version"]).err().unwrap();
    assert!(matches!(err, ScoringError::Version { found: 99, expected: 1 }), "{err}");
    let err = spawn(&["--fail", "exit"]).err().unwrap();
    assert!(matches!(err, ScoringError::NoHandshake { .. }), "{err}");
    let err = spawn(&["--fail", "silent"]).err().unwrap();
    assert!(matches!(err, ScoringError::HandshakeTimeout(_)), "{err}");
    let err = ExternalScorer::spawn(&["/nonexistent/scorer".into()], ExternalConfig::default())
        .err()
        .unwrap();
    assert!(matches!(err, ScoringError::Spawn { .. }), "{err}");
}

#[test]
fn error_responses_name_the_sentence() {
    let mut s = spawn(&["--fail", "error"]).unwrap();
    let err = s.score_batch(&["a b c".into()]).unwrap_err();
    assert!(err.to_string().contains("a b c"), "{err}");
}
