//! Atomic file emission: every output is written to a temporary file in the
//! target directory and renamed into place, so a failed run never leaves a
//! partially written artifact behind.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    io::Write::write_all(&mut tmp, bytes)?;
    let path = dir.join(name);
    tmp.persist(&path).map_err(|e| e.error)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_and_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_atomic(dir.path(), "a.csv", b"one\n").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"one\n");
        write_atomic(dir.path(), "a.csv", b"two\n").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two\n");
        // No stray temp files remain.
        let names: Vec<_> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        assert_eq!(names.len(), 1);
    }
}
