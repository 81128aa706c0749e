//! Plain-text mesh snapshots.
//!
//! ```text
//! ascii-tri v1
//! <vertex count>
//! x y            (one line per vertex)
//! <triangle count>
//! i j k          (0-based, one line per triangle)
//! ```

use std::io::{self, BufRead, Write};

use super::{Mesh, MeshError};

pub const ASCII_TRI_HEADER: &str = "ascii-tri v1";

pub fn write_ascii_tri(mesh: &Mesh, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{ASCII_TRI_HEADER}")?;
    writeln!(out, "{}", mesh.num_vertices())?;
    for [x, y] in mesh.vertices() {
        writeln!(out, "{x:?} {y:?}")?;
    }
    writeln!(out, "{}", mesh.num_triangles())?;
    for [i, j, k] in mesh.triangles() {
        writeln!(out, "{i} {j} {k}")?;
    }
    Ok(())
}

pub fn read_ascii_tri(input: impl BufRead) -> Result<Mesh, MeshError> {
    let mut lines = input.lines().enumerate().map(|(n, l)| (n + 1, l));
    let mut next = |what: &str| -> Result<(usize, String), MeshError> {
        match lines.next() {
            Some((n, Ok(l))) => Ok((n, l)),
            Some((n, Err(e))) => Err(MeshError::Parse {
                line: n,
                reason: e.to_string(),
            }),
            None => Err(MeshError::Parse {
                line: 0,
                reason: format!("unexpected end of input, expected {what}"),
            }),
        }
    };
    let bad = |line: usize, reason: &str| MeshError::Parse {
        line,
        reason: reason.to_string(),
    };

    let (n, header) = next("header")?;
    if header.trim() != ASCII_TRI_HEADER {
        return Err(bad(n, "missing 'ascii-tri v1' header"));
    }
    let (n, count) = next("vertex count")?;
    let nv: usize = count.trim().parse().map_err(|_| bad(n, "invalid vertex count"))?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, l) = next("vertex")?;
        let xs: Vec<f64> = l
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| bad(n, "invalid coordinate"))?;
        match xs[..] {
            [x, y] => vertices.push([x, y]),
            _ => return Err(bad(n, "expected two coordinates")),
        }
    }
    let (n, count) = next("triangle count")?;
    let nt: usize = count.trim().parse().map_err(|_| bad(n, "invalid triangle count"))?;
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (n, l) = next("triangle")?;
        let ids: Vec<usize> = l
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| bad(n, "invalid vertex index"))?;
        match ids[..] {
            [i, j, k] => triangles.push([i, j, k]),
            _ => return Err(bad(n, "expected three vertex indices")),
        }
    }
    Mesh::new(vertices, triangles)
}

#[cfg(test)]
mod tests {
    use super::super::square;
    use super::*;

    #[test]
    fn format_layout() {
        let mut buf = Vec::new();
        write_ascii_tri(&square(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "ascii-tri v1");
        assert_eq!(lines[1], "4");
        assert_eq!(lines[2], "0.0 0.0");
        assert_eq!(lines[6], "2");
        assert_eq!(lines[7], "0 2 3");
    }

    #[test]
    fn rejects_missing_header() {
        let err = read_ascii_tri("1\n0 0\n0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, MeshError::Parse { line: 1, .. }));
    }
}
