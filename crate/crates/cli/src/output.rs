use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// Where artifacts go: files under `--out`, else the primary one on stdout.
pub struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>) -> Result<Self> {
        if let Some(d) = &dir {
            std::fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
        }
        Ok(Self { dir })
    }

    /// The artifact printed when no directory is given.
    pub fn primary(&self, name: &str, contents: &str) -> Result<()> {
        match &self.dir {
            Some(d) => write_atomic(&d.join(name), contents),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(contents.as_bytes())?;
                if !contents.ends_with('\n') {
                    out.write_all(b"\n")?;
                }
                Ok(())
            }
        }
    }

    /// Artifacts written only with `--out`.
    pub fn extra(&self, name: &str, contents: &str) -> Result<()> {
        match &self.dir {
            Some(d) => write_atomic(&d.join(name), contents),
            None => Ok(()),
        }
    }
}

/// Writes through a temporary file in the same directory and renames it.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().context("artifact path has no file name")?.to_string_lossy();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    std::fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))?;
    Ok(())
}

pub fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifact serializes");
    s.push('\n');
    s
}
