use std::path::{Path, PathBuf};

use walkdir::WalkDir;

use crate::error::{Error, Result};

pub const DEFAULT_EXTENSIONS: &[&str] = &["png", "jpg", "jpeg"];

/// `path` relative to `root`, components joined with `/`.
pub fn relative_key(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

/// Recursively lists files whose extension matches one of `extensions`
/// (case-insensitive), ordered by the bytes of their `/`-joined relative path.
pub fn scan_corpus(dir: &Path, extensions: &[&str]) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Err(Error::io(
            dir,
            std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
        ));
    }
    let mut found = Vec::new();
    for entry in WalkDir::new(dir).follow_links(true) {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(dir).to_path_buf();
            Error::io(path, e.into())
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let matches = entry
            .path()
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| extensions.iter().any(|x| x.eq_ignore_ascii_case(e)));
        if matches {
            found.push((relative_key(dir, entry.path()), entry.into_path()));
        }
    }
    found.sort_by(|a, b| a.0.as_bytes().cmp(b.0.as_bytes()));
    Ok(found.into_iter().map(|(_, p)| p).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    #[test]
    fn empty_and_missing() {
        let dir = tempfile::tempdir().unwrap();
        assert!(scan_corpus(dir.path(), DEFAULT_EXTENSIONS).unwrap().is_empty());
        assert!(scan_corpus(&dir.path().join("nope"), DEFAULT_EXTENSIONS).is_err());
    }

    #[test]
    fn sorted_filtered_and_case_insensitive() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["b.png", "a.png", "notes.txt", "C.JPG"] {
            fs::write(dir.path().join(name), b"").unwrap();
        }
        fs::create_dir(dir.path().join("a")).unwrap();
        fs::write(dir.path().join("a/z.jpeg"), b"").unwrap();
        let keys: Vec<String> = scan_corpus(dir.path(), DEFAULT_EXTENSIONS)
            .unwrap()
            .iter()
            .map(|p| relative_key(dir.path(), p))
            .collect();
        // Bytewise: 'C' < 'a', and "a.png" < "a/z.jpeg" since '.' < '/'.
        assert_eq!(keys, vec!["C.JPG", "a.png", "a/z.jpeg", "b.png"]);
    }
}
