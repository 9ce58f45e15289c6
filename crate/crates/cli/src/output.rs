use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::error::CliError;

/// Fixed notation with 17 significant digits.
pub fn real(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (16 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

pub type CsvWriter = csv::Writer<BufWriter<File>>;

pub fn csv_writer(path: &Path, header: &[&str]) -> Result<CsvWriter, CliError> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(header)?;
    Ok(w)
}

/// Output directory of one run; its manifest is written before any work.
pub struct Run {
    dir: PathBuf,
    command: &'static str,
    config: Value,
    started: Instant,
    files: Vec<String>,
}

impl Run {
    pub fn start(command: &'static str, config: &ExperimentConfig) -> Result<Self, CliError> {
        let dir = config.out.join(command).join(config.master_seed.to_string());
        fs::create_dir_all(&dir)?;
        let run = Self {
            dir,
            command,
            config: serde_json::to_value(config)?,
            started: Instant::now(),
            files: Vec::new(),
        };
        run.write_manifest("running", None, &Value::Null)?;
        Ok(run)
    }

    pub fn sub_dir(&self, name: &str) -> Result<PathBuf, CliError> {
        let d = self.dir.join(name);
        fs::create_dir_all(&d)?;
        Ok(d)
    }

    /// Path of a file to be produced, recorded in the manifest.
    pub fn file(&mut self, relative: &str) -> PathBuf {
        self.files.push(relative.to_string());
        self.dir.join(relative)
    }

    pub fn write_json<T: Serialize>(&mut self, relative: &str, value: &T) -> Result<(), CliError> {
        let path = self.file(relative);
        serde_json::to_writer_pretty(BufWriter::new(File::create(path)?), value)?;
        Ok(())
    }

    fn write_manifest(&self, status: &str, exit_code: Option<i32>, results: &Value) -> Result<(), CliError> {
        let manifest = json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "status": status,
            "exit_code": exit_code,
            "elapsed_seconds": self.started.elapsed().as_secs_f64(),
            "config": self.config,
            "files": self.files,
            "results": results,
        });
        let tmp = self.dir.join("manifest.json.tmp");
        serde_json::to_writer_pretty(BufWriter::new(File::create(&tmp)?), &manifest)?;
        fs::rename(tmp, self.dir.join("manifest.json"))?;
        Ok(())
    }

    pub fn finish(self, exit_code: i32, results: Value) -> Result<i32, CliError> {
        self.write_manifest("complete", Some(exit_code), &results)?;
        Ok(exit_code)
    }
}
