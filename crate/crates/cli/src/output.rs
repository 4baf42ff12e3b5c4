//! Output files are written to a temporary sibling and renamed into place,
//! so a failed command never leaves a partial file behind.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use tempfile::NamedTempFile;

pub fn is_stdout(path: Option<&Path>) -> bool {
    path.is_none_or(|p| p.as_os_str() == "-")
}

/// Runs `fill` against a temporary file and renames it to `path` only if
/// `fill` and the flush succeed.
pub fn write_atomic<E>(path: &Path, fill: impl FnOnce(&mut dyn Write) -> Result<(), E>) -> Result<(), E>
where
    E: From<io::Error>,
{
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let tmp = NamedTempFile::new_in(dir)?;
    {
        let mut sink = BufWriter::new(tmp.as_file());
        fill(&mut sink)?;
        sink.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| E::from(e.error))?;
    Ok(())
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> io::Result<()> {
    write_atomic(path, |w| w.write_all(bytes))
}

/// Writes to `path`, or to standard output when `path` is absent or "-".
pub fn write_to<E>(path: Option<&Path>, fill: impl FnOnce(&mut dyn Write) -> Result<(), E>) -> Result<(), E>
where
    E: From<io::Error>,
{
    match path {
        Some(p) if !is_stdout(Some(p)) => write_atomic(p, fill),
        _ => {
            let stdout = io::stdout();
            let mut sink = BufWriter::new(stdout.lock());
            fill(&mut sink)?;
            sink.flush()?;
            Ok(())
        }
    }
}

pub fn read(path: &Path) -> io::Result<Vec<u8>> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        io::Read::read_to_end(&mut io::stdin().lock(), &mut buf)?;
        Ok(buf)
    } else {
        fs::read(path)
    }
}
