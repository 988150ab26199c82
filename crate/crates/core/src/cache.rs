//! Versioned, checksummed plain-text record files.
//!
//! Layout:
//!
//! ```text
//! # <format tag>
//! <record line>
//! ...
//! # sha256 <hex digest of the record lines, each followed by '\n'>
//! ```

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

fn digest(lines: &[&str]) -> String {
    let mut h = Sha256::new();
    for l in lines {
        h.update(l.as_bytes());
        h.update(b"\n");
    }
    h.finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect::<String>()
}

pub fn seal<S: AsRef<str>>(tag: &str, records: &[S]) -> String {
    let lines: Vec<&str> = records.iter().map(|s| s.as_ref()).collect();
    let mut out = format!("# {tag}\n");
    for l in &lines {
        out.push_str(l);
        out.push('\n');
    }
    out.push_str(&format!("# sha256 {}\n", digest(&lines)));
    out
}

/// Returns the record lines (with their 1-based line numbers) after checking
/// the tag and the checksum.
pub fn unseal<'a>(tag: &str, text: &'a str) -> Result<Vec<(usize, &'a str)>> {
    let mut lines: Vec<&str> = text.lines().collect();
    if lines.first().map(|l| l.trim_end()) != Some(&format!("# {tag}")) {
        return Err(Error::parse(1, format!("missing header `# {tag}`")));
    }
    let footer = lines
        .pop()
        .filter(|_| !lines.is_empty())
        .ok_or_else(|| Error::parse(1, "missing checksum footer"))?;
    let n = lines.len() + 1;
    let want = footer
        .trim_end()
        .strip_prefix("# sha256 ")
        .ok_or_else(|| Error::parse(n, "missing checksum footer"))?;
    let body = &lines[1..];
    if digest(body) != want {
        return Err(Error::parse(n, "checksum mismatch"));
    }
    Ok(body.iter().enumerate().map(|(i, l)| (i + 2, *l)).collect())
}
