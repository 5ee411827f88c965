use std::fs;
use std::io::{self, Write};
use std::path::Path;

use super::RunConfig;
use crate::Result;

/// `#`-prefixed header: tool version, command and the resolved configuration
/// (which includes the seed).
pub fn header(command: &str, config: &RunConfig) -> String {
    let mut out = format!("# failprob {}\n# command = {command}\n", env!("CARGO_PKG_VERSION"));
    for line in config.to_toml().lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out
}

/// Writes `contents` to `path` through a temporary sibling file that is
/// renamed into place, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(contents.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
        Some(path) => write_atomic(path, contents),
    }
}

pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "output".into());
    let tmp = path.with_file_name(format!(".{name}.{}.partial", std::process::id()));
    let result = (|| -> io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::ConfigOverlay;

    #[test]
    fn atomic_write_leaves_no_partial_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, "a,b\n1,2\n").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "a,b\n1,2\n");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);

        let missing = dir.path().join("nope").join("out.csv");
        assert!(write_atomic(&missing, "x").is_err());
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn header_lines_are_comments() {
        let cfg = ConfigOverlay::default().resolve().unwrap();
        let h = header("estimate", &cfg);
        assert!(h.lines().all(|l| l.starts_with('#')));
        assert!(h.contains("# seed = 42"));
        assert!(h.contains("# correlation_length = 0.1"));
    }
}
