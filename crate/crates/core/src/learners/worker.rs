//! External trainer protocol.
//!
//! One process per scoring call. The engine writes the training slice (with
//! labels) and the evaluation rows (without labels) to temporary CSV files,
//! sends one JSON request line on the worker's stdin and reads one JSON
//! response line from its stdout:
//!
//! ```text
//! -> {"op":"train_score","config":{...},"train_rows_path":"/abs/train.csv","eval_rows_path":"/abs/eval.csv","seed":7,"budget_units":11.1}
//! <- {"scores":[0.12,0.93,...]}
//! ```

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::space::Configuration;

use super::{LearnerError, Scorer, TrainInput, DEFAULT_WORKER_TIMEOUT};

#[derive(Debug, Clone, PartialEq)]
pub struct WorkerCommand {
    argv: Vec<String>,
    timeout: Duration,
}

impl WorkerCommand {
    pub fn new(argv: Vec<String>) -> Result<Self, LearnerError> {
        if argv.first().is_none_or(|p| p.trim().is_empty()) {
            return Err(LearnerError::Hyperparameter {
                name: "command".into(),
                reason: "worker command is empty".into(),
            });
        }
        Ok(WorkerCommand { argv, timeout: DEFAULT_WORKER_TIMEOUT })
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn program(&self) -> &str {
        &self.argv[0]
    }

    pub fn timeout(&self) -> Duration {
        self.timeout
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkerRequest {
    pub op: String,
    pub config: Configuration,
    pub train_rows_path: String,
    pub eval_rows_path: String,
    pub seed: u64,
    pub budget_units: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkerResponse {
    pub scores: Vec<f64>,
}

/// Sends `request` to a fresh worker process and returns its parsed reply.
pub fn worker_roundtrip(command: &WorkerCommand, request: &WorkerRequest) -> Result<WorkerResponse, LearnerError> {
    let mut line = serde_json::to_string(request).map_err(|e| LearnerError::Protocol(e.to_string()))?;
    line.push('\n');

    let mut child = Command::new(&command.argv[0])
        .args(&command.argv[1..])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(LearnerError::WorkerSpawn)?;

    let mut stdout = child.stdout.take().expect("piped stdout");
    let mut stderr = child.stderr.take().expect("piped stderr");
    let out_reader = thread::spawn(move || {
        let mut buf = String::new();
        stdout.read_to_string(&mut buf).map(|_| buf)
    });
    let err_reader = thread::spawn(move || {
        let mut buf = String::new();
        let _ = stderr.read_to_string(&mut buf);
        buf
    });
    {
        let mut stdin = child.stdin.take().expect("piped stdin");
        // a worker that exits without reading closes the pipe; its exit status tells the story
        let _ = stdin.write_all(line.as_bytes());
    }

    let started = Instant::now();
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break status;
        }
        if started.elapsed() >= command.timeout {
            let _ = child.kill();
            let _ = child.wait();
            return Err(LearnerError::WorkerTimeout(command.timeout));
        }
        thread::sleep(Duration::from_millis(5));
    };
    let output = out_reader.join().expect("stdout reader").map_err(LearnerError::Io)?;
    let stderr = err_reader.join().expect("stderr reader");
    if !status.success() {
        return Err(LearnerError::WorkerExit { status: status.to_string(), stderr: stderr.trim().to_string() });
    }
    let reply = output
        .lines()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| LearnerError::Protocol("worker wrote no response line".into()))?;
    serde_json::from_str(reply).map_err(|e| LearnerError::Protocol(format!("malformed response: {e}")))
}

/// Scorer backed by an external worker; training happens inside each call.
pub struct WorkerScorer {
    command: WorkerCommand,
    config: Configuration,
    train: Dataset,
    seed: u64,
    budget_units: f64,
}

impl WorkerScorer {
    pub fn new(command: WorkerCommand, config: &Configuration, input: TrainInput<'_>) -> Self {
        WorkerScorer {
            command,
            config: config.clone(),
            train: input.train.subset(input.rows),
            seed: input.seed,
            budget_units: input.budget_units,
        }
    }
}

impl Scorer for WorkerScorer {
    fn score_rows(&self, rows: &Dataset) -> Result<Vec<f64>, LearnerError> {
        if rows.feature_columns() != self.train.feature_columns() {
            return Err(LearnerError::SchemaMismatch {
                expected: self.train.feature_columns().to_vec(),
                got: rows.feature_columns().to_vec(),
            });
        }
        let dir = tempfile::tempdir()?;
        let train_path = dir.path().join("train.csv");
        let eval_path = dir.path().join("eval.csv");
        let all: Vec<usize> = (0..self.train.len()).collect();
        self.train.write_csv(&train_path, &all, true)?;
        let eval: Vec<usize> = (0..rows.len()).collect();
        rows.write_csv(&eval_path, &eval, false)?;
        let request = WorkerRequest {
            op: "train_score".into(),
            config: self.config.clone(),
            train_rows_path: std::path::absolute(&train_path)?.display().to_string(),
            eval_rows_path: std::path::absolute(&eval_path)?.display().to_string(),
            seed: self.seed,
            budget_units: self.budget_units,
        };
        let response = worker_roundtrip(&self.command, &request)?;
        if response.scores.len() != rows.len() {
            return Err(LearnerError::Protocol(format!(
                "expected {} scores, got {}",
                rows.len(),
                response.scores.len()
            )));
        }
        if let Some(bad) = response.scores.iter().find(|s| !(s.is_finite() && (0.0..=1.0).contains(*s))) {
            return Err(LearnerError::Protocol(format!("score {bad} outside [0, 1]")));
        }
        Ok(response.scores)
    }
}
