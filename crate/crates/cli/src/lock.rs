//! A lock file serializing pipeline runs against one database.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::AppError;

/// Held while `run` ingests into a database. The lock is the existence
/// of `<db>.lock`, created with `create_new` so two processes cannot
/// both win. Dropping the guard removes the file; a crash can leave it
/// behind, in which case the error message says which file to delete.
#[derive(Debug)]
pub struct DbLock {
    path: PathBuf,
}

impl DbLock {
    pub fn acquire(db: &Path) -> Result<Self, AppError> {
        let mut name = db.file_name().unwrap_or_default().to_os_string();
        name.push(".lock");
        let path = db.with_file_name(name);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut file) => {
                let _ = writeln!(file, "{}", std::process::id());
                Ok(DbLock { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                Err(AppError::Lock(format!(
                    "lock file {} exists; another run may be using this database \
                     (delete the file if that run is gone)",
                    path.display()
                )))
            }
            Err(e) => Err(AppError::io(
                format!("creating lock file {}", path.display()),
                e,
            )),
        }
    }

    #[cfg(test)]
    fn path(&self) -> &Path {
        &self.path
    }
}

impl Drop for DbLock {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.path);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lock_is_exclusive_and_released_on_drop() {
        let dir = tempfile::tempdir().unwrap();
        let db = dir.path().join("corpus.db");

        let lock = DbLock::acquire(&db).unwrap();
        assert!(lock.path().is_file());
        match DbLock::acquire(&db) {
            Err(AppError::Lock(msg)) => assert!(msg.contains("corpus.db.lock")),
            other => panic!("expected the lock to be held, got {other:?}"),
        }

        let path = lock.path().to_path_buf();
        drop(lock);
        assert!(!path.exists());
        drop(DbLock::acquire(&db).unwrap());
    }
}
