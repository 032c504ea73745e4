//! JSON instance files. Rationals are strings (`"3/4"`, `"2"`), infinite box
//! values are `"inf:<tag>"`, and a `problem` field selects the kind.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixture::instance::{Dist, MixtureInstance};
use crate::model::{DtInstance, ExplicitPbInstance, MsscfInstance, Outcome, PolicyTree, ThresholdPbInstance, Value};
use crate::rational::{fmt_q, parse_q, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Pb(ExplicitPbInstance),
    Pbt(ThresholdPbInstance),
    Dt(DtInstance),
    Msscf(MsscfInstance),
    Mixture(MixtureInstance),
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Pb(_) => "pb",
            Instance::Pbt(_) => "pbt",
            Instance::Dt(_) => "dt",
            Instance::Msscf(_) => "msscf",
            Instance::Mixture(_) => "mixture",
        }
    }

    /// (actions, scenarios or components)
    pub fn size(&self) -> (usize, usize) {
        match self {
            Instance::Pb(i) => (i.n(), i.m()),
            Instance::Pbt(i) => (i.n(), i.m()),
            Instance::Dt(i) => (i.n(), i.m()),
            Instance::Msscf(i) => (i.n(), i.m()),
            Instance::Mixture(i) => (i.n(), i.m()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&Doc::from(self)).expect("instance documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Instance> {
        let doc: Doc = serde_json::from_str(text)?;
        doc.try_into()
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Instance> {
        Instance::from_json(&fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}

macro_rules! instance_from {
    ($($ty:ty => $variant:ident),*) => {$(
        impl From<$ty> for Instance {
            fn from(i: $ty) -> Self {
                Instance::$variant(i)
            }
        }
    )*};
}

instance_from!(
    ExplicitPbInstance => Pb,
    ThresholdPbInstance => Pbt,
    DtInstance => Dt,
    MsscfInstance => Msscf,
    MixtureInstance => Mixture
);

pub fn read_policy(path: impl AsRef<Path>) -> Result<PolicyTree> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

pub fn write_policy(policy: &PolicyTree, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(policy)? + "\n")?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "lowercase")]
enum Doc {
    Pb(PbDoc),
    Pbt(PbtDoc),
    Dt(DtDoc),
    Msscf(MsscfDoc),
    Mixture(MixtureDoc),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PbDoc {
    costs: Vec<String>,
    probs: Vec<String>,
    values: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PbtDoc {
    threshold: String,
    costs: Vec<String>,
    probs: Vec<String>,
    values: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DtDoc {
    costs: Vec<String>,
    probs: Vec<String>,
    outcomes: Vec<Vec<Outcome>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MsscfDoc {
    costs: Vec<String>,
    probs: Vec<String>,
    membership: Vec<Vec<bool>>,
    feedback: Vec<Vec<Outcome>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MixtureDoc {
    epsilon: String,
    costs: Vec<String>,
    weights: Vec<String>,
    /// `dists[box][component]` is a list of `[value, probability]` pairs.
    dists: Vec<Vec<Vec<(String, String)>>>,
}

fn qs(xs: &[Q]) -> Vec<String> {
    xs.iter().map(fmt_q).collect()
}

fn parse_qs(xs: &[String]) -> Result<Vec<Q>> {
    xs.iter().map(|s| parse_q(s)).collect()
}

fn values_doc(values: &[Vec<Value>]) -> Vec<Vec<String>> {
    values.iter().map(|row| row.iter().map(Value::to_string).collect()).collect()
}

fn parse_values(rows: &[Vec<String>]) -> Result<Vec<Vec<Value>>> {
    rows.iter().map(|row| row.iter().map(|s| Value::parse(s)).collect()).collect()
}

impl From<&Instance> for Doc {
    fn from(inst: &Instance) -> Doc {
        match inst {
            Instance::Pb(i) => Doc::Pb(PbDoc { costs: qs(&i.costs), probs: qs(&i.probs), values: values_doc(&i.values) }),
            Instance::Pbt(i) => Doc::Pbt(PbtDoc {
                threshold: fmt_q(&i.threshold),
                costs: qs(&i.base.costs),
                probs: qs(&i.base.probs),
                values: values_doc(&i.base.values),
            }),
            Instance::Dt(i) => Doc::Dt(DtDoc { costs: qs(&i.costs), probs: qs(&i.probs), outcomes: i.outcomes.clone() }),
            Instance::Msscf(i) => Doc::Msscf(MsscfDoc {
                costs: qs(&i.costs),
                probs: qs(&i.probs),
                membership: i.membership.clone(),
                feedback: i.feedback.clone(),
            }),
            Instance::Mixture(i) => Doc::Mixture(MixtureDoc {
                epsilon: fmt_q(&i.epsilon),
                costs: qs(&i.costs),
                weights: qs(&i.weights),
                dists: i
                    .dists
                    .iter()
                    .map(|row| {
                        row.iter().map(|d| d.points().iter().map(|(v, p)| (fmt_q(v), fmt_q(p))).collect()).collect()
                    })
                    .collect(),
            }),
        }
    }
}

impl TryFrom<Doc> for Instance {
    type Error = Error;

    fn try_from(doc: Doc) -> Result<Instance> {
        Ok(match doc {
            Doc::Pb(d) => Instance::Pb(ExplicitPbInstance::new(parse_qs(&d.costs)?, parse_qs(&d.probs)?, parse_values(&d.values)?)),
            Doc::Pbt(d) => Instance::Pbt(ThresholdPbInstance::new(
                ExplicitPbInstance::new(parse_qs(&d.costs)?, parse_qs(&d.probs)?, parse_values(&d.values)?),
                parse_q(&d.threshold)?,
            )),
            Doc::Dt(d) => Instance::Dt(DtInstance::new(parse_qs(&d.costs)?, parse_qs(&d.probs)?, d.outcomes)),
            Doc::Msscf(d) => {
                Instance::Msscf(MsscfInstance::new(parse_qs(&d.costs)?, parse_qs(&d.probs)?, d.membership, d.feedback))
            }
            Doc::Mixture(d) => {
                let dists = d
                    .dists
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|pts| {
                                let pts = pts
                                    .iter()
                                    .map(|(v, p)| Ok((parse_q(v)?, parse_q(p)?)))
                                    .collect::<Result<Vec<_>>>()?;
                                Ok(Dist::new(pts))
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                Instance::Mixture(MixtureInstance::new(
                    parse_qs(&d.costs)?,
                    parse_qs(&d.weights)?,
                    dists,
                    parse_q(&d.epsilon)?,
                ))
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    #[test]
    fn pb_round_trip_with_infinities() {
        let inst: Instance = ExplicitPbInstance::new(
            vec![qi(1), q(3, 2)],
            vec![q(1, 3), q(2, 3)],
            vec![vec![Value::Finite(qi(0)), Value::inf("x")], vec![Value::Finite(q(7, 4)), Value::Finite(qi(2))]],
        )
        .into();
        let text = inst.to_json();
        assert!(text.contains("\"inf:x\""));
        assert!(text.contains("\"3/2\""));
        let back = Instance::from_json(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn mixture_round_trip() {
        let d = Dist::new([(qi(0), q(1, 2)), (qi(3), q(1, 2))]);
        let inst: Instance = MixtureInstance::new(vec![qi(1)], vec![qi(1)], vec![vec![d]], qi(1)).into();
        let back = Instance::from_json(&inst.to_json()).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn unknown_problem_is_rejected() {
        assert!(Instance::from_json(r#"{"problem":"tsp"}"#).is_err());
    }
}
