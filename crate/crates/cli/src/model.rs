//! Model files: a flat TOML table with the keys listed on [`ModelFile`].

use std::path::Path;

use equiblow_core::blowup::{EquivariantBundle, LocalModel};
use equiblow_core::dcrit::dcritical_chart;
use equiblow_core::family::FamilyModel;
use equiblow_core::{Error, Ideal, MultiPoly, Rational, Result, Ring, WeightMatrix};
use serde::Deserialize;

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Text(String),
}

impl Number {
    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            Number::Int(n) => Ok(Rational::from_integer((*n).into())),
            Number::Text(s) => parse_rational(s),
        }
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse {
        pos: 0,
        msg: format!("not a rational number: `{s}`"),
    };
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0 {
                return Err(bad());
            }
            Ok(Rational::new(a.into(), b.into()))
        }
        None => Ok(Rational::from_integer(
            s.parse::<i64>().map_err(|_| bad())?.into(),
        )),
    }
}

/// Comma-separated rationals, as given to `--point`.
pub fn parse_point(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(parse_rational).collect()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub variables: Vec<String>,
    /// `k` rows of `n` integers.
    pub weights: Vec<Vec<i64>>,
    pub potential: Option<String>,
    pub ideal: Option<Vec<String>>,
    pub section: Option<Vec<String>>,
    /// `k` rows of `r` integers, one column per frame element.
    pub frame_weights: Option<Vec<Vec<i64>>>,
    pub twist: Option<u32>,
    pub base_parameter: Option<String>,
    pub basepoint: Option<Vec<Number>>,
    pub hint: Option<String>,
}

#[derive(Clone, Debug)]
pub enum Source {
    Potential(MultiPoly),
    Ideal(Ideal),
}

/// A parsed and validated model.
#[derive(Clone, Debug)]
pub struct Model {
    pub name: String,
    pub ring: Ring,
    pub weights: WeightMatrix,
    pub source: Source,
    /// The explicit section, for files that give one.
    pub section: Option<Vec<MultiPoly>>,
    pub frame_weights: Option<Vec<Vec<i64>>>,
    pub twist: u32,
    pub base: Option<String>,
    pub basepoint: Option<Vec<Rational>>,
    pub hint: Option<MultiPoly>,
}

fn shape(msg: impl Into<String>) -> Error {
    Error::Parse {
        pos: 0,
        msg: msg.into(),
    }
}

impl Model {
    pub fn load(path: &Path) -> Result<Model> {
        let text =
            std::fs::read_to_string(path).map_err(|e| shape(format!("{}: {e}", path.display())))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Model::parse(&name, &text)
    }

    pub fn parse(name: &str, text: &str) -> Result<Model> {
        let file: ModelFile = toml::from_str(text).map_err(|e| Error::Parse {
            pos: e.span().map(|s| s.start).unwrap_or(0),
            msg: e.message().to_string(),
        })?;
        Model::from_file(name, file)
    }

    pub fn from_file(name: &str, file: ModelFile) -> Result<Model> {
        let ring = Ring::new(&file.variables)?;
        let n = ring.nvars();
        if file.weights.iter().any(|row| row.len() != n) {
            return Err(shape(format!("every weight row needs {n} entries")));
        }
        let weights = WeightMatrix::new(n, file.weights.clone())?;
        let source = match (&file.potential, &file.ideal) {
            (Some(f), None) => {
                let f = ring.parse(f)?;
                if !weights.is_invariant(&f) {
                    return Err(Error::precondition(format!(
                        "potential {f} is not invariant"
                    )));
                }
                Source::Potential(f)
            }
            (None, Some(gens)) => Source::Ideal(Ideal::parse(&ring, gens)?),
            _ => return Err(shape("give exactly one of `potential` and `ideal`")),
        };
        let section = file
            .section
            .as_ref()
            .map(|s| s.iter().map(|p| ring.parse(p)).collect::<Result<Vec<_>>>())
            .transpose()?;
        if let Some(fw) = &file.frame_weights {
            let r = section.as_ref().map(Vec::len).unwrap_or(0);
            if section.is_none() {
                return Err(shape("`frame_weights` needs a `section`"));
            }
            if fw.len() != weights.k() || fw.iter().any(|row| row.len() != r) {
                return Err(shape(format!(
                    "`frame_weights` must have {} rows of {r} entries",
                    weights.k()
                )));
            }
        }
        if let Some(b) = &file.base_parameter {
            let t = ring
                .var_index(b)
                .map_err(|_| shape(format!("unknown base parameter `{b}`")))?;
            if !weights.is_zero_column(t) {
                return Err(Error::precondition(format!(
                    "base parameter `{b}` must have weight zero"
                )));
            }
        }
        let basepoint = file
            .basepoint
            .as_ref()
            .map(|p| {
                p.iter()
                    .map(Number::to_rational)
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        if basepoint.as_ref().is_some_and(|p| p.len() != n) {
            return Err(shape(format!("`basepoint` needs {n} coordinates")));
        }
        let hint = file.hint.as_ref().map(|h| ring.parse(h)).transpose()?;
        Ok(Model {
            name: name.to_string(),
            ring,
            weights,
            source,
            section,
            frame_weights: file.frame_weights,
            twist: file.twist.unwrap_or(0),
            base: file.base_parameter,
            basepoint,
            hint,
        })
    }

    /// The ideal the pipeline blows up.
    pub fn ideal(&self) -> Ideal {
        match &self.source {
            Source::Potential(f) => Ideal::new(
                &self.ring,
                (0..self.ring.nvars()).map(|i| f.partial_derivative(i)),
            ),
            Source::Ideal(i) => i.clone(),
        }
    }

    pub fn potential(&self) -> Option<&MultiPoly> {
        match &self.source {
            Source::Potential(f) => Some(f),
            Source::Ideal(_) => None,
        }
    }

    /// The local model: the d-critical chart of the potential (relative
    /// to the base parameter if there is one), or the explicit section.
    pub fn local_model(&self) -> Result<Option<LocalModel>> {
        if let Some(f) = self.potential() {
            let mut m = match &self.base {
                Some(b) => FamilyModel::from_potential(f, &self.weights, b)?.model,
                None => dcritical_chart(f, &self.weights)?.model,
            };
            m.bundle.twist = self.twist;
            return Ok(Some(m));
        }
        let Some(section) = &self.section else {
            return Ok(None);
        };
        let k = self.weights.k();
        let fw = self
            .frame_weights
            .clone()
            .unwrap_or_else(|| vec![vec![0; section.len()]; k]);
        let columns: Vec<Vec<i64>> = (0..section.len())
            .map(|j| fw.iter().map(|row| row[j]).collect())
            .collect();
        let mut bundle = EquivariantBundle::new(
            (0..section.len()).map(|j| format!("e{j}")).collect(),
            columns,
        )?;
        bundle.twist = self.twist;
        Ok(Some(LocalModel::new(
            &self.ring,
            self.weights.clone(),
            bundle,
            section.clone(),
            None,
        )?))
    }

    pub fn family(&self) -> Result<FamilyModel> {
        let Some(b) = &self.base else {
            return Err(Error::precondition("model has no `base_parameter`"));
        };
        let m = self
            .local_model()?
            .ok_or_else(|| Error::precondition("family needs a potential or a section"))?;
        FamilyModel::new(m, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_validates() {
        let m = Model::parse(
            "e2",
            r#"
variables = ["x", "y", "z"]
weights = [[1, -1, 0]]
potential = "x*y*z"
basepoint = [0, "1/2", 0]
"#,
        )
        .unwrap();
        assert_eq!(m.ideal().gens().len(), 3);
        assert_eq!(m.basepoint.unwrap()[1], Rational::new(1.into(), 2.into()));
        let bad_key = Model::parse(
            "x",
            "variables = [\"x\"]\nweights = [[1]]\nideal = [\"x\"]\ncolour = 1\n",
        );
        assert!(matches!(bad_key, Err(Error::Parse { .. })));
        let both = Model::parse(
            "x",
            "variables = [\"x\"]\nweights = [[0]]\nideal = [\"x\"]\npotential = \"x\"\n",
        );
        assert!(matches!(both, Err(Error::Parse { .. })));
        let moving_base = Model::parse(
            "x",
            "variables = [\"x\", \"t\"]\nweights = [[0, 1]]\npotential = \"x^2\"\nbase_parameter = \"t\"\n",
        );
        assert!(matches!(moving_base, Err(Error::Precondition(_))));
        assert!(parse_point("1,-2,3/4").is_ok());
        assert!(parse_point("1,a").is_err());
    }
}
