//! `key=value` run files merged into the command line. Explicit flags win.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use crate::error::CliError;

/// Manifest keys that describe a run rather than configure it.
const RECORD_ONLY: &[&str] = &[
    "schema",
    "subcommand",
    "output",
    "version",
    "rng",
    "duration-secs",
    "input-sha256",
    "config",
];

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_config(text: &str, origin: &Path) -> Result<Vec<(String, String)>, CliError> {
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{}: line {}: expected key=value", origin.display(), i + 1)))?;
        entries.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(entries)
}

fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut iter = argv.iter();
    while let Some(arg) = iter.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            return iter.next().cloned();
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(v.into());
        }
    }
    None
}

fn has_flag(argv: &[OsString], key: &str) -> bool {
    let flag = format!("--{key}");
    let with_value = format!("--{key}=");
    argv.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag || s.starts_with(&with_value)
    })
}

/// Appends config entries as flags for every key not already given.
pub fn merge_config(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let path = Path::new(&path).to_path_buf();
    let text =
        fs::read_to_string(&path).map_err(|e| CliError::Data(format!("cannot read config {}: {e}", path.display())))?;
    let mut merged = argv;
    for (key, value) in parse_config(&text, &path)? {
        if RECORD_ONLY.contains(&key.as_str()) || has_flag(&merged, &key) {
            continue;
        }
        match value.as_str() {
            "true" => merged.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                merged.push(format!("--{key}").into());
                merged.push(value.into());
            }
        }
    }
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn parses_comments_and_rejects_junk() {
        let e = parse_config("# c\n\nseed = 7\npaths=3\n", Path::new("x")).unwrap();
        assert_eq!(e, vec![("seed".into(), "7".into()), ("paths".into(), "3".into())]);
        assert!(parse_config("oops\n", Path::new("x")).is_err());
    }

    #[test]
    fn flags_win_over_config() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        fs::write(
            &cfg,
            "seed=7\nlength=50\nensemble=true\nprices=false\nsubcommand=simulate\n",
        )
        .unwrap();
        let argv = os(&[
            "hhscaling",
            "simulate",
            "--length",
            "20",
            "--config",
            cfg.to_str().unwrap(),
        ]);
        let merged = merge_config(argv).unwrap();
        let tail: Vec<String> = merged[6..].iter().map(|s| s.to_string_lossy().into_owned()).collect();
        assert_eq!(tail, vec!["--seed", "7", "--ensemble"]);
    }

    #[test]
    fn missing_config_is_reported() {
        let argv = os(&["hhscaling", "simulate", "--config=/nonexistent/run.cfg"]);
        assert!(matches!(merge_config(argv), Err(CliError::Data(m)) if m.contains("/nonexistent/run.cfg")));
    }
}
