use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use kyfan_core::analyzer::MatrixLinearMap;
use kyfan_core::numerics::parse_mat;
use kyfan_core::Mat;
use serde_json::Value;

use crate::{CliError, CliResult};

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn with_path(path: &Path) -> impl FnOnce(kyfan_core::Error) -> CliError + '_ {
    move |e| CliError::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

pub fn read_mat(path: &Path) -> CliResult<Mat> {
    parse_mat(&read_text(path)?).map_err(with_path(path))
}

pub fn read_map(path: &Path) -> CliResult<MatrixLinearMap> {
    MatrixLinearMap::parse(&read_text(path)?).map_err(with_path(path))
}

/// Compact or pretty JSON, always newline-terminated.
pub fn render(value: &Value, compact: bool) -> String {
    let mut s = if compact {
        serde_json::to_string(value)
    } else {
        serde_json::to_string_pretty(value)
    }
    .expect("JSON values serialize");
    s.push('\n');
    s
}

/// Writes to `out` when given, otherwise to stdout.
pub fn emit(text: &str, out: Option<&PathBuf>) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Output {
            path: path.clone(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Output {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}
