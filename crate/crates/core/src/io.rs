//! Plain-text QUBO files.
//!
//! One term per line as `i j value` (`i == j` for a linear term). Optional
//! `vars N` declares trailing unused variables and `offset c` sets the
//! constant. Blank lines and `#` comments are ignored. Repeated terms add up.

use std::path::Path;

use crate::error::{Error, Result};
use crate::qubo::QuboProblem;

pub fn parse_qubo(text: &str, path: &Path) -> Result<QuboProblem> {
    let err = |line: usize, message: String| Error::Parse { path: path.to_path_buf(), message: format!("line {line}: {message}") };
    let mut declared = 0usize;
    let mut offset = 0.0;
    let mut terms: Vec<(usize, usize, f64)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let number = |s: &str| s.parse::<f64>().ok().filter(|v| v.is_finite());
        let index = |s: &str| s.parse::<usize>().map_err(|_| err(line, format!("bad variable index {s:?}")));
        match fields.as_slice() {
            ["vars", n] => declared = index(n)?,
            ["offset", c] => offset = number(c).ok_or_else(|| err(line, format!("bad offset {c:?}")))?,
            [i, j, v] => {
                let v = number(v).ok_or_else(|| err(line, format!("bad coefficient {v:?}")))?;
                terms.push((index(i)?, index(j)?, v));
            }
            _ => return Err(err(line, format!("expected `i j value`, `vars N` or `offset c`, got {content:?}"))),
        }
    }
    let n = terms.iter().map(|&(i, j, _)| i.max(j) + 1).max().unwrap_or(0).max(declared);
    if n == 0 {
        return Err(Error::Parse { path: path.to_path_buf(), message: "no variables".into() });
    }
    let mut q = QuboProblem::new(n);
    for (i, j, v) in terms {
        if i == j {
            q.add_linear(i, v)?;
        } else {
            q.add_quadratic(i, j, v)?;
        }
    }
    q.set_offset(offset)?;
    Ok(q)
}

pub fn read_qubo(path: &Path) -> Result<QuboProblem> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_qubo(&text, path)
}

pub fn format_qubo(q: &QuboProblem) -> String {
    let mut out = format!("vars {}\n", q.num_vars());
    if q.offset() != 0.0 {
        out += &format!("offset {}\n", q.offset());
    }
    for (i, v) in q.linear_terms() {
        if v != 0.0 {
            out += &format!("{i} {i} {v}\n");
        }
    }
    for ((i, j), v) in q.quadratic_terms() {
        out += &format!("{i} {j} {v}\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::Assignment;

    #[test]
    fn parses_terms_and_comments() {
        let q = parse_qubo("# two vars\n0 0 -1\n1 1 -1\n0 1 2  # coupling\n\noffset 0.5\n", Path::new("t")).unwrap();
        assert_eq!(q.num_vars(), 2);
        assert_eq!(q.energy(&Assignment::new(vec![1, 0]).unwrap()).unwrap(), -0.5);
        assert_eq!(parse_qubo("vars 5\n0 1 1", Path::new("t")).unwrap().num_vars(), 5);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_qubo("0 0 1\n0 x 1\n", Path::new("p.txt")).unwrap_err().to_string();
        assert!(e.contains("p.txt") && e.contains("line 2"), "{e}");
        let e = parse_qubo("0 0 1\n\n1 1\n", Path::new("p.txt")).unwrap_err().to_string();
        assert!(e.contains("line 3"), "{e}");
        assert!(parse_qubo("# nothing\n", Path::new("p.txt")).is_err());
    }

    #[test]
    fn round_trip() {
        let q = crate::qubo::tests::random_qubo(6, 0.5, 2);
        let back = parse_qubo(&format_qubo(&q), Path::new("r")).unwrap();
        for idx in 0..64 {
            let a = Assignment::from_index(idx, 6);
            assert!((q.energy(&a).unwrap() - back.energy(&a).unwrap()).abs() < 1e-12);
        }
    }
}
