//! Line protocol for out-of-process normalizers.
//!
//! Request: `NORM\t<token>\n`. Reply: `OK\t<stem>\n` or `ERR\t<message>\n`.
//! One reply per request; the session is serial.

use std::io::{BufRead, BufReader, Read, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use crate::error::{Error, Result};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(5);

const STDERR_TAIL_BYTES: usize = 2048;

pub struct ExternalSession {
    command: Vec<String>,
    child: Child,
    stdin: Option<ChildStdin>,
    replies: Receiver<std::io::Result<String>>,
    stderr_tail: Arc<Mutex<Vec<u8>>>,
    timeout: Duration,
    /// Set once a request went unanswered; later replies could be out of step.
    broken: Option<String>,
}

impl ExternalSession {
    pub fn spawn(command: &[String], timeout: Duration) -> Result<Self> {
        let (program, args) = command
            .split_first()
            .ok_or_else(|| Error::Config("external normalizer command is empty".into()))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| Error::Config(format!("cannot start `{}`: {e}", command.join(" "))))?;

        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, replies) = mpsc::channel();
        thread::spawn(move || {
            let mut reader = BufReader::new(stdout);
            loop {
                let mut line = String::new();
                match reader.read_line(&mut line) {
                    Ok(0) => break,
                    Ok(_) => {
                        if tx.send(Ok(line)).is_err() {
                            break;
                        }
                    }
                    Err(e) => {
                        let _ = tx.send(Err(e));
                        break;
                    }
                }
            }
        });

        let stderr_tail = Arc::new(Mutex::new(Vec::new()));
        let mut stderr = child.stderr.take().expect("piped stderr");
        let tail = Arc::clone(&stderr_tail);
        thread::spawn(move || {
            let mut buf = [0u8; 512];
            while let Ok(n) = stderr.read(&mut buf) {
                if n == 0 {
                    break;
                }
                let mut tail = tail.lock().unwrap_or_else(|p| p.into_inner());
                tail.extend_from_slice(&buf[..n]);
                let excess = tail.len().saturating_sub(STDERR_TAIL_BYTES);
                tail.drain(..excess);
            }
        });

        Ok(Self {
            command: command.to_vec(),
            stdin: child.stdin.take(),
            child,
            replies,
            stderr_tail,
            timeout,
            broken: None,
        })
    }

    pub fn command_line(&self) -> String {
        self.command.join(" ")
    }

    fn fail(&self, token: &str, message: impl Into<String>) -> Error {
        Error::External {
            command: self.command_line(),
            token: token.to_string(),
            message: message.into(),
        }
    }

    fn diagnostics(&mut self) -> String {
        let mut parts = Vec::new();
        if let Ok(Some(status)) = self.child.try_wait() {
            parts.push(format!("process exited with {status}"));
        }
        let tail = self.stderr_tail.lock().unwrap_or_else(|p| p.into_inner());
        let stderr = String::from_utf8_lossy(&tail);
        let stderr = stderr.trim();
        if !stderr.is_empty() {
            parts.push(format!("stderr: {stderr}"));
        }
        parts.join("; ")
    }

    pub fn normalize(&mut self, token: &str) -> Result<String> {
        if let Some(reason) = &self.broken {
            return Err(self.fail(token, format!("session unusable: {reason}")));
        }
        if token.contains(['\t', '\n', '\r']) {
            return Err(self.fail(token, "token contains a protocol separator"));
        }
        let sent = match self.stdin.as_mut() {
            Some(stdin) => writeln!(stdin, "NORM\t{token}").and_then(|_| stdin.flush()),
            None => Err(std::io::ErrorKind::BrokenPipe.into()),
        };
        if let Err(e) = sent {
            // Give a dying process a moment so its exit status is visible.
            thread::sleep(Duration::from_millis(20));
            let diag = self.diagnostics();
            self.broken = Some(format!("write failed: {e}"));
            return Err(self.fail(token, format!("write failed: {e}; {diag}")));
        }

        match self.replies.recv_timeout(self.timeout) {
            Ok(Ok(line)) => {
                let line = line.trim_end_matches(['\n', '\r']);
                match line.split_once('\t') {
                    Some(("OK", stem)) => Ok(stem.to_string()),
                    Some(("ERR", message)) => Err(self.fail(token, message)),
                    _ => {
                        self.broken = Some("protocol violation".into());
                        Err(self.fail(token, format!("unexpected reply {line:?}")))
                    }
                }
            }
            Ok(Err(e)) => {
                self.broken = Some(format!("read failed: {e}"));
                Err(self.fail(token, format!("read failed: {e}")))
            }
            Err(RecvTimeoutError::Timeout) => {
                self.broken = Some("timed out".into());
                Err(self.fail(token, format!("no reply within {:?}", self.timeout)))
            }
            Err(RecvTimeoutError::Disconnected) => {
                let _ = self.child.wait();
                let diag = self.diagnostics();
                self.broken = Some("end of stream".into());
                Err(self.fail(token, format!("unexpected end of stream; {diag}")))
            }
        }
    }
}

impl Drop for ExternalSession {
    fn drop(&mut self) {
        drop(self.stdin.take());
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl std::fmt::Debug for ExternalSession {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExternalSession")
            .field("command", &self.command)
            .field("timeout", &self.timeout)
            .field("broken", &self.broken)
            .finish()
    }
}
