use std::fs::OpenOptions;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};

use crate::error::Result;

/// Create `dir/stem.ext`, or `dir/stem-1.ext`, `dir/stem-2.ext`, ... if taken.
/// Existing files are never opened for writing.
pub fn write_once(dir: &Path, stem: &str, ext: &str, contents: &[u8]) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    for i in 0u32.. {
        let name = if i == 0 { format!("{stem}.{ext}") } else { format!("{stem}-{i}.{ext}") };
        let path = dir.join(name);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                f.write_all(contents)?;
                return Ok(path);
            }
            Err(e) if e.kind() == ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(e.into()),
        }
    }
    unreachable!("u32 suffixes exhausted")
}
