//! Knot presentations and the `key = value` preset format.

use std::path::Path;

use num_traits::Zero;
use serde::Serialize;

use crate::algebra::rational::int;
use crate::algebra::{parse_poly, MultiPoly};
use crate::error::{Error, Result};
use crate::word::GroupWord;

const FIG8: &str = include_str!("../presets/fig8.knot");
const TREFOIL: &str = include_str!("../presets/trefoil.knot");

/// Two-generator one-relator presentation whose generators `a`, `b` are
/// conjugate meridians.
#[derive(Clone, Debug, Serialize)]
pub struct KnotPresentation {
    pub name: String,
    pub relator: GroupWord,
    pub meridian: GroupWord,
    pub longitude: Option<GroupWord>,
    /// Alexander polynomial in `t`.
    pub alexander: MultiPoly,
    pub vol_constant: Option<f64>,
    pub cs_constant: Option<f64>,
}

impl KnotPresentation {
    /// Parses the preset text format: `key = value` lines, `#` comments.
    pub fn parse(src: &str) -> Result<Self> {
        let mut name = None;
        let mut relator = None;
        let mut meridian = None;
        let mut longitude = None;
        let mut alexander = None;
        let mut vol = None;
        let mut cs = None;
        for (lineno, raw) in src.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidKnot(format!("line {}: expected key = value", lineno + 1))
            })?;
            let value = value.trim();
            let real = |v: &str| {
                v.parse::<f64>()
                    .map_err(|_| Error::InvalidKnot(format!("line {}: bad number {v:?}", lineno + 1)))
            };
            match key.trim() {
                "name" => name = Some(value.to_string()),
                "relator" => relator = Some(GroupWord::parse(value)?),
                "meridian" => meridian = Some(GroupWord::parse(value)?),
                "longitude" => longitude = Some(GroupWord::parse(value)?),
                "alexander" => {
                    alexander = Some(parse_poly(value, &["t"]).map_err(|e| {
                        Error::InvalidKnot(format!("alexander polynomial: {e}"))
                    })?)
                }
                "vol_constant" => vol = Some(real(value)?),
                "cs_constant" => cs = Some(real(value)?),
                other => {
                    return Err(Error::InvalidKnot(format!(
                        "line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        let relator = relator.ok_or_else(|| Error::InvalidKnot("missing relator".into()))?;
        if relator.is_empty() {
            return Err(Error::InvalidKnot("relator is empty".into()));
        }
        let alexander = alexander.unwrap_or_else(|| MultiPoly::one(&["t"]));
        if alexander.eval_rational(&[int(1)]).is_zero() {
            return Err(Error::InvalidKnot("alexander polynomial vanishes at t = 1".into()));
        }
        Ok(KnotPresentation {
            name: name.unwrap_or_else(|| "unnamed".into()),
            relator,
            meridian: meridian.unwrap_or_else(|| GroupWord::generator(0)),
            longitude,
            alexander,
            vol_constant: vol,
            cs_constant: cs,
        })
    }

    /// A shipped preset by name.
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "fig8" | "figure-eight" | "4_1" => Self::parse(FIG8),
            "trefoil" | "3_1" => Self::parse(TREFOIL),
            _ => Err(Error::InvalidKnot(format!("no builtin preset {name:?}"))),
        }
    }

    pub fn builtin_names() -> &'static [&'static str] {
        &["fig8", "trefoil"]
    }

    /// Loads a builtin name or a preset file path.
    pub fn load(spec: &str) -> Result<Self> {
        if let Ok(k) = Self::builtin(spec) {
            return Ok(k);
        }
        let path = Path::new(spec);
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidKnot(format!("{spec}: {e}")))?;
        Self::parse(&text)
    }

    pub fn longitude(&self) -> Result<&GroupWord> {
        self.longitude
            .as_ref()
            .ok_or_else(|| Error::InvalidKnot(format!("{}: no longitude given", self.name)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse() {
        let k = KnotPresentation::builtin("fig8").unwrap();
        assert_eq!(k.relator.len(), 10);
        assert_eq!(k.vol_constant, Some(2.029883212819));
        assert_eq!(k.cs_constant, Some(0.0));
        assert!(KnotPresentation::builtin("trefoil").is_ok());
    }

    #[test]
    fn rejects_bad_presets() {
        assert!(KnotPresentation::parse("relator =\n").is_err());
        assert!(KnotPresentation::parse("relator = abx\n").is_err());
        assert!(KnotPresentation::parse("relator = abAB\nalexander = t - 1\n").is_err());
        assert!(KnotPresentation::parse("relator = ab\ncolour = red\n").is_err());
    }
}
