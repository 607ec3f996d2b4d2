use std::time::{Duration, Instant};

use stemeval::normalizer::{ExternalSession, Normalizer, NormalizerKind, NormalizerSpec};
use stemeval::Error;

fn sh(script: &str) -> Vec<String> {
    vec!["sh".into(), "-c".into(), script.into()]
}

/// Replies with the first three characters, or ERR for "bad".
const PREFIX3: &str = r#"while IFS= read -r line; do
  tok="${line#NORM	}"
  if [ "$tok" = bad ]; then printf 'ERR\tcannot stem %s\n' "$tok"
  else printf 'OK\t%s\n' "$(printf %s "$tok" | cut -c1-3)"; fi
done"#;

#[test]
fn round_trips_tokens() {
    let mut session = ExternalSession::spawn(&sh(PREFIX3), Duration::from_secs(5)).unwrap();
    assert_eq!(session.normalize("running").unwrap(), "run");
    assert_eq!(session.normalize("ox").unwrap(), "ox");
}

#[test]
fn utf8_passes_through() {
    let echo = r#"while IFS= read -r line; do printf 'OK\t%s\n' "${line#NORM	}"; done"#;
    let mut session = ExternalSession::spawn(&sh(echo), Duration::from_secs(5)).unwrap();
    assert_eq!(session.normalize("naïveté").unwrap(), "naïveté");
    assert_eq!(session.normalize("বাংলা").unwrap(), "বাংলা");
}

#[test]
fn err_reply_is_reported_and_session_continues() {
    let mut session = ExternalSession::spawn(&sh(PREFIX3), Duration::from_secs(5)).unwrap();
    match session.normalize("bad") {
        Err(Error::External { token, message, .. }) => {
            assert_eq!(token, "bad");
            assert!(message.contains("cannot stem"), "{message}");
        }
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(session.normalize("walking").unwrap(), "wal");
}

#[test]
fn process_exiting_mid_session() {
    let script = r#"read -r line; printf 'OK\tfirst\n'; echo 'giving up' >&2; exit 3"#;
    let mut session = ExternalSession::spawn(&sh(script), Duration::from_secs(5)).unwrap();
    assert_eq!(session.normalize("one").unwrap(), "first");
    let e = session.normalize("two").unwrap_err();
    assert!(matches!(e, Error::External { .. }), "{e}");
    // Unusable from now on.
    assert!(session.normalize("three").is_err());
}

#[test]
fn unresponsive_process_times_out() {
    let start = Instant::now();
    let mut session = ExternalSession::spawn(&sh("sleep 30"), Duration::from_millis(200)).unwrap();
    let e = session.normalize("word").unwrap_err();
    assert!(e.to_string().contains("word"), "{e}");
    assert!(start.elapsed() < Duration::from_secs(5));
}

#[test]
fn malformed_reply_is_a_protocol_error() {
    let script = r#"while read -r line; do echo garbage; done"#;
    let mut session = ExternalSession::spawn(&sh(script), Duration::from_secs(5)).unwrap();
    assert!(session.normalize("word").is_err());
}

#[test]
fn missing_program_fails_at_construction() {
    let spec = NormalizerSpec::new(NormalizerKind::External {
        command: vec!["/nonexistent/stemmer-binary".into()],
        timeout_ms: 1000,
    });
    assert!(matches!(Normalizer::new(&spec), Err(Error::Config(_))));
}

#[test]
fn normalizer_wraps_session() {
    let spec = NormalizerSpec::new(NormalizerKind::External {
        command: sh(PREFIX3),
        timeout_ms: 5000,
    });
    let n = Normalizer::new(&spec).unwrap();
    assert_eq!(n.normalize_token("connection").unwrap(), "con");
    assert!(n.normalize_token("bad").is_err());
}
