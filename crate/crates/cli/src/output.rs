//! Output directory staging. Files are written under temporary names and
//! only renamed into place by [`Staging::commit`]; dropping an uncommitted
//! staging area deletes everything it wrote.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

pub struct Staging {
    dir: PathBuf,
    created_dir: bool,
    staged: Vec<(PathBuf, PathBuf)>,
    committed: bool,
}

impl Staging {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        let created_dir = !dir.exists();
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self { dir: dir.to_path_buf(), created_dir, staged: Vec::new(), committed: false })
    }

    /// Stages `name` with whatever `fill` writes.
    pub fn write_with(
        &mut self,
        name: &str,
        fill: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    ) -> Result<(), CliError> {
        let target = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.partial"));
        self.staged.push((tmp.clone(), target));
        let file = File::create(&tmp).map_err(|e| CliError::io(&tmp, e))?;
        let mut w = BufWriter::new(file);
        fill(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(&tmp, e))
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        self.write_with(name, |w| w.write_all(text.as_bytes()))
    }

    /// Pretty JSON with a trailing newline.
    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        self.write_with(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            w.write_all(b"\n")
        })
    }

    pub fn write_jsonl<T: Serialize>(&mut self, name: &str, records: &[T]) -> Result<(), CliError> {
        self.write_with(name, |w| pedbench::dataset::write_jsonl_to(records, w))
    }

    /// Moves every staged file into place and returns the final paths.
    pub fn commit(mut self) -> Result<Vec<PathBuf>, CliError> {
        for (tmp, target) in &self.staged {
            fs::rename(tmp, target).map_err(|e| CliError::io(target, e))?;
        }
        self.committed = true;
        Ok(self.staged.iter().map(|(_, t)| t.clone()).collect())
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        if self.committed {
            return;
        }
        for (tmp, _) in &self.staged {
            let _ = fs::remove_file(tmp);
        }
        if self.created_dir {
            // Only succeeds if nothing else ended up in there.
            let _ = fs::remove_dir(&self.dir);
        }
    }
}
