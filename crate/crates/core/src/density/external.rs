//! Densities computed by a child process speaking JSON lines.
//!
//! Request:  `{"id": <int>, "x": [<p unit-scale reals>]}`
//! Response: `{"id": <int>, "logf": <finite real>}`
//!
//! The child is started through `sh -c` with `MED_DENSITY_DIM` set to `p`.
//! A timeout or dead child triggers one restart and a retry of the same
//! request; a second failure aborts. Malformed or non-finite responses abort
//! immediately.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use serde_json::Value;

use super::{DensityModel, UnitBox};
use crate::error::{MedError, Result};

pub const DIM_ENV_VAR: &str = "MED_DENSITY_DIM";

#[derive(Debug, Clone)]
pub struct ExternalConfig {
    pub command: String,
    pub dim: usize,
    pub timeout: Duration,
    pub max_concurrency: usize,
    /// Original-scale box, for reporting only; the child always receives
    /// unit-scale coordinates.
    pub bounds: Option<UnitBox>,
}

impl ExternalConfig {
    pub fn new(command: impl Into<String>, dim: usize) -> Self {
        ExternalConfig {
            command: command.into(),
            dim,
            timeout: Duration::from_secs(600),
            max_concurrency: 1,
            bounds: None,
        }
    }
}

enum Failure {
    /// Timeout, broken pipe, or exited child: worth one restart.
    Transport(String),
    /// The child answered, but wrongly.
    Protocol(String),
}

struct Worker {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
}

impl Worker {
    fn spawn(cfg: &ExternalConfig) -> std::io::Result<Worker> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&cfg.command)
            .env(DIM_ENV_VAR, cfg.dim.to_string())
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(Worker {
            child,
            stdin,
            lines: rx,
        })
    }

    fn request(&mut self, id: u64, x: &[f64], timeout: Duration) -> std::result::Result<f64, Failure> {
        let msg = serde_json::json!({ "id": id, "x": x });
        writeln!(self.stdin, "{msg}")
            .and_then(|_| self.stdin.flush())
            .map_err(|e| Failure::Transport(format!("write failed: {e}")))?;
        let line = match self.lines.recv_timeout(timeout) {
            Ok(Ok(line)) => line,
            Ok(Err(e)) => return Err(Failure::Transport(format!("read failed: {e}"))),
            Err(RecvTimeoutError::Timeout) => {
                return Err(Failure::Transport(format!("no response within {timeout:?}")))
            }
            Err(RecvTimeoutError::Disconnected) => {
                return Err(Failure::Transport("child process closed its output".into()))
            }
        };
        parse_response(&line, id).map_err(Failure::Protocol)
    }

    fn kill(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

fn parse_response(line: &str, id: u64) -> std::result::Result<f64, String> {
    let v: Value = serde_json::from_str(line.trim()).map_err(|e| format!("malformed response '{line}': {e}"))?;
    match v.get("id").and_then(Value::as_u64) {
        Some(got) if got == id => {}
        Some(got) => return Err(format!("response id {got} does not match request id {id}")),
        None => return Err(format!("response without integer id: '{line}'")),
    }
    match v.get("logf").and_then(Value::as_f64) {
        Some(l) if l.is_finite() => Ok(l),
        _ => Err(format!("response logf is not a finite number: '{line}'")),
    }
}

/// A density evaluated by one or more child processes.
pub struct ExternalDensity {
    cfg: ExternalConfig,
    bounds: UnitBox,
    workers: Vec<Mutex<Worker>>,
    next_id: AtomicU64,
}

pub fn make_external(cfg: ExternalConfig) -> Result<ExternalDensity> {
    if cfg.dim == 0 {
        return Err(MedError::invalid("external density needs p >= 1"));
    }
    if cfg.max_concurrency == 0 {
        return Err(MedError::invalid("max_concurrency must be at least 1"));
    }
    if let Some(b) = &cfg.bounds {
        if b.dim() != cfg.dim {
            return Err(MedError::invalid("box dimension does not match p"));
        }
    }
    let workers = (0..cfg.max_concurrency)
        .map(|_| Worker::spawn(&cfg).map(Mutex::new))
        .collect::<std::io::Result<Vec<_>>>()?;
    let bounds = cfg.bounds.clone().unwrap_or_else(|| UnitBox::unit(cfg.dim));
    Ok(ExternalDensity {
        cfg,
        bounds,
        workers,
        next_id: AtomicU64::new(0),
    })
}

impl ExternalDensity {
    fn evaluate_on(&self, worker: usize, x: &[f64]) -> Result<f64> {
        let mut w = self.workers[worker].lock().expect("worker lock poisoned");
        let mut restarted = false;
        loop {
            let id = self.next_id.fetch_add(1, Ordering::SeqCst);
            match w.request(id, x, self.cfg.timeout) {
                Ok(v) => return Ok(v),
                Err(Failure::Protocol(reason)) => {
                    return Err(MedError::Protocol {
                        point: x.to_vec(),
                        reason,
                    })
                }
                Err(Failure::Transport(reason)) => {
                    w.kill();
                    if restarted {
                        return Err(MedError::Evaluation {
                            point: x.to_vec(),
                            reason: format!("{reason} (after one restart)"),
                        });
                    }
                    restarted = true;
                    *w = Worker::spawn(&self.cfg).map_err(|e| MedError::Evaluation {
                        point: x.to_vec(),
                        reason: format!("{reason}; restart failed: {e}"),
                    })?;
                }
            }
        }
    }
}

impl DensityModel for ExternalDensity {
    fn name(&self) -> &str {
        "external"
    }

    fn dim(&self) -> usize {
        self.cfg.dim
    }

    fn unit_box(&self) -> &UnitBox {
        &self.bounds
    }

    fn log_density(&self, x: &[f64]) -> Result<f64> {
        self.evaluate_on(0, x)
    }

    fn log_density_batch(&self, xs: &[&[f64]]) -> Vec<Result<f64>> {
        let nw = self.workers.len();
        if nw == 1 || xs.len() < 2 {
            return xs.iter().map(|x| self.log_density(x)).collect();
        }
        let mut slots: Vec<Option<Result<f64>>> = (0..xs.len()).map(|_| None).collect();
        thread::scope(|scope| {
            let handles: Vec<_> = (0..nw)
                .map(|w| {
                    scope.spawn(move || {
                        (w..xs.len())
                            .step_by(nw)
                            .map(|i| (i, self.evaluate_on(w, xs[i])))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                for (i, r) in h.join().expect("external worker thread panicked") {
                    slots[i] = Some(r);
                }
            }
        });
        slots.into_iter().map(|s| s.expect("every slot filled")).collect()
    }

    fn is_external(&self) -> bool {
        true
    }
}

impl Drop for ExternalDensity {
    fn drop(&mut self) {
        for w in &self.workers {
            if let Ok(mut w) = w.lock() {
                w.kill();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn response_parsing() {
        assert_eq!(parse_response(r#"{"id":3,"logf":0.0}"#, 3).unwrap(), 0.0);
        assert_eq!(parse_response(r#"{"id":3,"logf":-2.5,"extra":1}"#, 3).unwrap(), -2.5);
        assert!(parse_response(r#"{"id":3,"logf":"nan"}"#, 3).is_err());
        assert!(parse_response(r#"{"id":4,"logf":0.0}"#, 3).is_err());
        assert!(parse_response(r#"{"logf":0.0}"#, 3).is_err());
        assert!(parse_response("not json", 3).is_err());
    }
}
