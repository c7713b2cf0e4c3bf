//! Block files: `n t m` header, then `m` lines of `t` ascending 1-based
//! indices. Lines starting with `#` are comments; a `# kind: ...` comment
//! restores the kind tag. With `t = 0` each block is an empty line.

use std::path::Path;

use super::{Block, Kind, SetSystem};
use crate::{Error, Result};

pub fn render_blocks(sys: &SetSystem) -> String {
    let mut out = String::new();
    out.push_str(&format!("# kind: {}\n", sys.kind.label()));
    out.push_str(&format!("{} {} {}\n", sys.n, sys.t, sys.len()));
    for b in sys.blocks() {
        let line: Vec<String> = b.iter().map(|x| x.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_blocks(sys: &SetSystem, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, render_blocks(sys))?;
    Ok(())
}

pub fn read_blocks(path: impl AsRef<Path>) -> Result<SetSystem> {
    parse_blocks(&std::fs::read_to_string(path)?)
}

fn parse_fields(line: &str, lineno: usize) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|w| {
            w.parse::<usize>()
                .map_err(|_| Error::parse(lineno, format!("not a non-negative integer: {w:?}")))
        })
        .collect()
}

pub fn parse_blocks(text: &str) -> Result<SetSystem> {
    let mut kind = Kind::Unspecified;
    let mut header: Option<(usize, usize, usize)> = None;
    let mut blocks: Vec<(usize, Block)> = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.split('\n').enumerate() {
        let lineno = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if let Some(c) = line.trim_start().strip_prefix('#') {
            if let Some(label) = c.trim().strip_prefix("kind:") {
                kind = Kind::parse_label(label.trim())
                    .ok_or_else(|| Error::parse(lineno, format!("unknown kind {:?}", label.trim())))?;
            }
            continue;
        }
        match header {
            None => {
                if line.trim().is_empty() {
                    continue;
                }
                let f = parse_fields(line, lineno)?;
                let [n, t, m] = f[..] else {
                    return Err(Error::parse(lineno, "malformed header, expected \"n t m\""));
                };
                if n == 0 || n > super::MAX_N || t > n {
                    return Err(Error::parse(lineno, format!("malformed header: n={n} t={t}")));
                }
                header = Some((n, t, m));
            }
            Some((n, t, m)) => {
                if blocks.len() == m {
                    if line.trim().is_empty() {
                        continue;
                    }
                    return Err(Error::parse(lineno, "block count mismatch: more blocks than header says"));
                }
                // A trailing empty segment is the end of the file, not an empty block.
                if line.trim().is_empty() && (t > 0 || i + 1 == text.split('\n').count()) {
                    continue;
                }
                let f = parse_fields(line, lineno)?;
                if f.len() != t {
                    return Err(Error::parse(lineno, format!("expected {t} indices, found {}", f.len())));
                }
                if let Some(&x) = f.iter().find(|&&x| x == 0 || x > n) {
                    return Err(Error::parse(lineno, format!("index {x} out of range 1..={n}")));
                }
                if f.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::parse(lineno, "indices must be strictly ascending"));
                }
                let b = Block::from_members(f.iter().copied()).map_err(|e| Error::parse(lineno, e.to_string()))?;
                if let Some((first, _)) = blocks.iter().find(|(_, o)| *o == b) {
                    return Err(Error::parse(lineno, format!("duplicate block, first seen on line {first}")));
                }
                blocks.push((lineno, b));
                last_line = lineno;
            }
        }
    }
    let Some((n, t, m)) = header else {
        return Err(Error::parse(1, "malformed header: file is empty"));
    };
    if blocks.len() != m {
        return Err(Error::parse(
            last_line.max(1),
            format!("block count mismatch: header says {m}, found {}", blocks.len()),
        ));
    }
    SetSystem::new(n, t, kind, blocks.into_iter().map(|(_, b)| b).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_s42_witness() {
        let s = parse_blocks("4 2 3\n1 2\n2 3\n1 3\n").unwrap();
        assert_eq!((s.n, s.t, s.len()), (4, 2, 3));
        assert_eq!(s.kind, Kind::Unspecified);
        let members: Vec<Vec<usize>> = s.blocks().iter().map(|b| b.members()).collect();
        assert_eq!(members, vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
    }

    #[test]
    fn block_count_mismatch() {
        let e = parse_blocks("4 2 3\n1 2\n2 3\n").unwrap_err();
        assert!(e.to_string().contains("block count mismatch"), "{e}");
        let e = parse_blocks("4 2 1\n1 2\n2 3\n").unwrap_err();
        assert!(e.to_string().contains("block count mismatch"), "{e}");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_blocks("4 2\n1 2\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }), "{e}");
        let e = parse_blocks("# c\n4 2 2\n1 2\n1 5\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }), "{e}");
        let e = parse_blocks("4 2 2\n1 2\n1 2\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        assert!(e.to_string().contains("duplicate"));
        let e = parse_blocks("4 2 1\n2 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
    }

    #[test]
    fn comments_and_crlf() {
        let s = parse_blocks("# hi\r\n# kind: turan 3\r\n4 2 1\r\n# mid\r\n1 2\r\n").unwrap();
        assert_eq!(s.kind, Kind::Turan { s: 3 });
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn empty_blocks_round_trip() {
        let s = SetSystem::new(5, 0, Kind::Se, vec![Block::empty()]).unwrap();
        let text = render_blocks(&s);
        assert_eq!(parse_blocks(&text).unwrap(), s);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.txt");
        let s = parse_blocks("# kind: se\n4 2 3\n2 3\n1 2\n1 3\n").unwrap();
        write_blocks(&s, &p).unwrap();
        assert_eq!(read_blocks(&p).unwrap(), s);
    }
}
