//! The `--driver` mini-language for `m(t)`.
//!
//! Pieces are separated by `;` and chained from `m = 1`:
//! `line(to)`, `arc(center, turns)` around `center` from the current
//! point, and `circle(c, r[, turns])`, which goes out to the circle
//! `|m - c| = r`, runs around it and comes back.

use std::f64::consts::TAU;
use std::str::FromStr;

use knotchar::regulator::Piece;
use knotchar::Error;
use num_complex::Complex64;

fn complex(s: &str) -> Result<Complex64, Error> {
    let s = s.trim();
    Complex64::from_str(s).map_err(|_| Error::Input(format!("bad complex number {s:?}")))
}

fn real(s: &str) -> Result<f64, Error> {
    s.trim().parse().map_err(|_| Error::Input(format!("bad number {:?}", s.trim())))
}

fn call(src: &str) -> Result<(&str, Vec<&str>), Error> {
    let src = src.trim();
    let open = src.find('(').ok_or_else(|| Error::Input(format!("expected name(args) in {src:?}")))?;
    let inner = src[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| Error::Input(format!("missing ')' in {src:?}")))?;
    Ok((src[..open].trim(), inner.split(',').collect()))
}

pub fn parse(src: &str) -> Result<Vec<Piece>, Error> {
    let mut here = Complex64::new(1.0, 0.0);
    let mut out = Vec::new();
    for part in src.split(';').filter(|s| !s.trim().is_empty()) {
        let (name, args) = call(part)?;
        match (name, args.len()) {
            ("line", 1) => {
                let to = complex(args[0])?;
                out.push(Piece::Segment { from: here, to });
                here = to;
            }
            ("arc", 2) => {
                let center = complex(args[0])?;
                let turns = real(args[1])?;
                let radius = (here - center).norm();
                if radius == 0.0 {
                    return Err(Error::Input("arc centre is the current point".into()));
                }
                let start = (here - center).arg() / TAU;
                out.push(Piece::Arc { center, radius, start, turns });
                here = center + Complex64::from_polar(radius, TAU * (start + turns));
            }
            ("circle", 2 | 3) => {
                let c = complex(args[0])?;
                let r = real(args[1])?;
                let turns = args.get(2).map(|a| real(a)).transpose()?.unwrap_or(1.0);
                if r <= 0.0 {
                    return Err(Error::Input("circle radius must be positive".into()));
                }
                let dir = if (here - c).norm() > 0.0 { (here - c).unscale((here - c).norm()) } else { Complex64::new(1.0, 0.0) };
                let p = c + dir * r;
                if (p - here).norm() > 0.0 {
                    out.push(Piece::Segment { from: here, to: p });
                }
                out.push(Piece::Arc { center: c, radius: r, start: dir.arg() / TAU, turns });
                let end = c + Complex64::from_polar(r, dir.arg() + TAU * turns);
                if (end - here).norm() > 0.0 {
                    out.push(Piece::Segment { from: end, to: here });
                }
            }
            _ => return Err(Error::Input(format!("unknown driver piece {part:?}"))),
        }
    }
    if out.is_empty() {
        return Err(Error::Input("empty driver".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_goes_out_and_back() {
        let p = parse("circle(1.0, 0.1)").unwrap();
        assert_eq!(p.len(), 3);
        let (end, _) = p[2].at(1.0);
        assert!((end - 1.0).norm() < 1e-15);
        let (mid, _) = p[1].at(0.5);
        assert!((mid - 0.9).norm() < 1e-12);
    }

    #[test]
    fn chained_pieces() {
        let p = parse("line(2); arc(0, 0.5)").unwrap();
        let (end, _) = p[1].at(1.0);
        assert!((end + 2.0).norm() < 1e-12);
        assert!(parse("spiral(1)").is_err());
        assert!(parse("").is_err());
    }
}
