use std::ffi::OsString;

use crate::{CliError, CliResult};

/// Parses flat `key = value` text. `#` starts a comment; blank lines are
/// skipped; later keys replace earlier ones.
pub fn parse_config(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("config line {}: expected key=value, got {raw:?}", i + 1)));
        };
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(CliError::Usage(format!("config line {}: bad key {:?}", i + 1, k.trim())));
        }
        let value = v.trim().to_string();
        out.retain(|(k, _)| *k != key);
        out.push((key, value));
    }
    Ok(out)
}

/// Appends config entries as `--key=value` unless the flag is already on
/// the command line. `true` turns into a bare switch, `false` drops it.
pub fn merge_config(mut argv: Vec<OsString>, entries: &[(String, String)]) -> Vec<OsString> {
    for (key, value) in entries {
        let flag = format!("--{key}");
        let present = argv.iter().any(|a| {
            let a = a.to_string_lossy();
            a == flag || a.starts_with(&format!("{flag}="))
        });
        if present {
            continue;
        }
        match value.as_str() {
            "true" => argv.push(flag.into()),
            "false" => {}
            _ => argv.push(format!("{flag}={value}").into()),
        }
    }
    argv
}

/// Resolves `--config PATH` (if any) into extra flags.
pub(crate) fn apply_config_file(argv: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        let s = a.to_string_lossy();
        if let Some(p) = s.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else if s == "--config" {
            path = argv.get(i + 1).map(|p| p.to_string_lossy().into_owned());
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Usage(format!("cannot read config {path}: {e}")))?;
    Ok(merge_config(argv, &parse_config(&text)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_pairs() {
        let c = parse_config("# preset\nsymbol = cusp\nn=64  # small\n\nbits = 256\nn = 32\n").unwrap();
        assert_eq!(
            c,
            vec![
                ("symbol".to_string(), "cusp".to_string()),
                ("bits".to_string(), "256".to_string()),
                ("n".to_string(), "32".to_string()),
            ]
        );
        assert!(parse_config("just words").is_err());
        assert!(parse_config("config = x").is_err());
    }

    #[test]
    fn flags_override_file() {
        let argv: Vec<OsString> = ["specdecay", "spectrum", "--n", "16"].iter().map(Into::into).collect();
        let entries = parse_config("n = 64\nsymbol = scale:0.5\nhyperplane = true\ntail_order = 0").unwrap();
        let merged: Vec<String> = merge_config(argv, &entries)
            .into_iter()
            .map(|s| s.into_string().unwrap())
            .collect();
        assert_eq!(
            merged,
            ["specdecay", "spectrum", "--n", "16", "--symbol=scale:0.5", "--hyperplane", "--tail-order=0"]
        );
    }
}
