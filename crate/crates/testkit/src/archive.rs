//! Deterministic tar.gz fixtures shaped like code-host snapshot
//! tarballs: a single `<name>-<rev>/` root directory wrapping the tree.

use std::io::Write;
use std::path::Path;

use flate2::write::GzEncoder;
use flate2::Compression;

/// Build a gzipped tarball at `dest` whose entries live under `root/`.
/// Returns the archive size in bytes. Headers are fully deterministic
/// (epoch mtime, fixed ownership), so identical inputs give identical
/// archives.
pub fn build_tar_gz(
    dest: &Path,
    root: &str,
    files: &[(&str, &str)],
) -> std::io::Result<u64> {
    let file = std::fs::File::create(dest)?;
    let encoder = GzEncoder::new(file, Compression::default());
    let mut builder = tar::Builder::new(encoder);

    let mut dir_header = tar::Header::new_gnu();
    dir_header.set_entry_type(tar::EntryType::Directory);
    dir_header.set_size(0);
    dir_header.set_mode(0o755);
    dir_header.set_mtime(0);
    dir_header.set_uid(0);
    dir_header.set_gid(0);
    builder.append_data(&mut dir_header, format!("{root}/"), std::io::empty())?;

    for (name, content) in files {
        let mut header = tar::Header::new_gnu();
        header.set_entry_type(tar::EntryType::Regular);
        header.set_size(content.len() as u64);
        header.set_mode(0o644);
        header.set_mtime(0);
        header.set_uid(0);
        header.set_gid(0);
        builder.append_data(&mut header, format!("{root}/{name}"), content.as_bytes())?;
    }

    let encoder = builder.into_inner()?;
    let mut file = encoder.finish()?;
    file.flush()?;
    Ok(file.metadata()?.len())
}

/// Total bytes `files` will occupy once extracted (content lengths).
pub fn extracted_size(files: &[(&str, &str)]) -> u64 {
    files.iter().map(|(_, content)| content.len() as u64).sum()
}
