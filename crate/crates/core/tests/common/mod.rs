#![allow(dead_code)]

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;

use stemeval::corpus::{self, ColumnRef, Corpus, CorpusFormat, TokenizedDocument, TokenizerConfig};

pub fn mini_corpus_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/english_mini.tsv")
}

pub fn mini_format() -> CorpusFormat {
    CorpusFormat {
        text_col: ColumnRef::Name("text".into()),
        label_col: ColumnRef::Name("label".into()),
        id_col: Some(ColumnRef::Name("id".into())),
        delimiter: b'\t',
        has_header: true,
    }
}

pub fn load_mini() -> (Corpus, Vec<TokenizedDocument>) {
    let load = corpus::load_corpus(mini_corpus_path(), &mini_format()).expect("bundled corpus loads");
    let docs = load.corpus.tokenize(&TokenizerConfig::default());
    (load.corpus, docs)
}

pub fn tokenized(id: &str, tokens: &[&str]) -> TokenizedDocument {
    TokenizedDocument {
        doc_id: id.to_string(),
        tokens: tokens.iter().map(|s| s.to_string()).collect(),
    }
}

/// How the mock service answers.
#[derive(Clone, Copy, PartialEq)]
pub enum MockMode {
    /// One fixed unit vector per text, dim 8.
    Fixed,
    /// A vector depending on the text (length and first byte), dim 8.
    TextDependent,
    /// Status 500.
    Fail,
    /// One vector too few.
    ShortReply,
}

/// Minimal single-threaded HTTP embedding service on a loopback port.
pub struct MockService {
    pub url: String,
    pub requests: Arc<AtomicUsize>,
}

fn vector_for(text: &str, mode: MockMode) -> Vec<f64> {
    let mut v = vec![0.0; 8];
    match mode {
        MockMode::TextDependent => {
            v[0] = text.len() as f64;
            v[1] = f64::from(text.bytes().next().unwrap_or(0));
            v[2] = 1.0;
        }
        _ => v[0] = 1.0,
    }
    v
}

pub fn spawn_mock(mode: MockMode) -> MockService {
    let listener = TcpListener::bind("127.0.0.1:0").expect("bind loopback");
    let url = format!("http://{}/embed", listener.local_addr().unwrap());
    let requests = Arc::new(AtomicUsize::new(0));
    let counter = Arc::clone(&requests);
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let counter = Arc::clone(&counter);
            thread::spawn(move || {
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut content_length = 0usize;
                loop {
                    let mut line = String::new();
                    if reader.read_line(&mut line).unwrap_or(0) == 0 {
                        return;
                    }
                    let line = line.trim_end();
                    if line.is_empty() {
                        break;
                    }
                    if let Some((k, v)) = line.split_once(':') {
                        if k.eq_ignore_ascii_case("content-length") {
                            content_length = v.trim().parse().unwrap_or(0);
                        }
                    }
                }
                let mut body = vec![0u8; content_length];
                if reader.read_exact(&mut body).is_err() {
                    return;
                }
                counter.fetch_add(1, Ordering::SeqCst);
                let request: serde_json::Value = serde_json::from_slice(&body).unwrap_or_default();
                let texts: Vec<String> = request["texts"]
                    .as_array()
                    .map(|a| a.iter().filter_map(|t| t.as_str().map(str::to_string)).collect())
                    .unwrap_or_default();
                let (status, payload) = match mode {
                    MockMode::Fail => ("500 Internal Server Error", r#"{"error":"down"}"#.to_string()),
                    _ => {
                        let mut vectors: Vec<Vec<f64>> = texts.iter().map(|t| vector_for(t, mode)).collect();
                        if mode == MockMode::ShortReply {
                            vectors.pop();
                        }
                        ("200 OK", serde_json::json!({ "vectors": vectors }).to_string())
                    }
                };
                let _ = write!(
                    stream,
                    "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{payload}",
                    payload.len()
                );
                let _ = stream.flush();
            });
        }
    });
    MockService { url, requests }
}
