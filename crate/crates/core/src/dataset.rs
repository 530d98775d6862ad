//! Aligned gold values and per-system predictions over one evaluation set.

use std::collections::{HashMap, HashSet};

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::metrics::{LabelValue, ValueKind, Values, ValuesRef};

#[derive(Debug, Clone, PartialEq)]
pub struct PairedEvaluationSet {
    instance_ids: Vec<String>,
    kind: ValueKind,
    /// Label strings indexed by code; empty for real-valued sets.
    vocabulary: Vec<String>,
    gold: Values,
    systems: IndexMap<String, Values>,
}

impl PairedEvaluationSet {
    /// Builds a set from row-aligned sequences. All sequences must have the
    /// same length `N >= 1` and hold the same value variant.
    pub fn new<S: Into<String>>(
        instance_ids: Vec<String>,
        gold: Vec<LabelValue>,
        systems: impl IntoIterator<Item = (S, Vec<LabelValue>)>,
    ) -> Result<Self> {
        let n = gold.len();
        if n == 0 {
            return Err(Error::InsufficientData("evaluation set has no instances".into()));
        }
        if instance_ids.len() != n {
            return Err(Error::Alignment(format!(
                "{} instance ids for {n} gold values",
                instance_ids.len()
            )));
        }
        let mut seen = HashSet::with_capacity(n);
        for id in &instance_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId {
                    id: id.clone(),
                    source_name: "instance ids".into(),
                });
            }
        }

        let kind = gold[0].kind();
        let mut interner = Interner::default();
        let gold = encode(&gold, kind, "gold", &mut interner)?;
        let mut encoded = IndexMap::new();
        for (name, preds) in systems {
            let name = name.into();
            if preds.len() != n {
                return Err(Error::Alignment(format!(
                    "system {name:?} has {} predictions for {n} instances",
                    preds.len()
                )));
            }
            let values = encode(&preds, kind, &name, &mut interner)?;
            if encoded.insert(name.clone(), values).is_some() {
                return Err(Error::DuplicateId {
                    id: name,
                    source_name: "system names".into(),
                });
            }
        }
        Ok(PairedEvaluationSet {
            instance_ids,
            kind,
            vocabulary: interner.labels,
            gold,
            systems: encoded,
        })
    }

    /// Convenience constructor with ids `"0".."N-1"`.
    pub fn from_rows<S: Into<String>>(
        gold: Vec<LabelValue>,
        systems: impl IntoIterator<Item = (S, Vec<LabelValue>)>,
    ) -> Result<Self> {
        let ids = (0..gold.len()).map(|i| i.to_string()).collect();
        Self::new(ids, gold, systems)
    }

    pub fn n_instances(&self) -> usize {
        self.instance_ids.len()
    }

    pub fn instance_ids(&self) -> &[String] {
        &self.instance_ids
    }

    pub fn kind(&self) -> ValueKind {
        self.kind
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn gold(&self) -> &Values {
        &self.gold
    }

    pub fn system_names(&self) -> impl Iterator<Item = &str> {
        self.systems.keys().map(String::as_str)
    }

    pub fn n_systems(&self) -> usize {
        self.systems.len()
    }

    pub fn system(&self, name: &str) -> Result<&Values> {
        self.systems
            .get(name)
            .ok_or_else(|| Error::UnknownSystem(name.to_owned()))
    }

    pub fn system_ref(&self, name: &str) -> Result<ValuesRef<'_>> {
        self.system(name).map(Values::as_ref)
    }
}

#[derive(Default)]
struct Interner {
    codes: HashMap<String, u32>,
    labels: Vec<String>,
}

impl Interner {
    fn code(&mut self, label: &str) -> u32 {
        if let Some(&c) = self.codes.get(label) {
            return c;
        }
        let c = self.labels.len() as u32;
        self.labels.push(label.to_owned());
        self.codes.insert(label.to_owned(), c);
        c
    }
}

fn encode(values: &[LabelValue], kind: ValueKind, source: &str, interner: &mut Interner) -> Result<Values> {
    let mismatch = |v: &LabelValue| Error::Type(format!("{source} mixes {} and {kind} values", v.kind()));
    match kind {
        ValueKind::Categorical => values
            .iter()
            .map(|v| match v {
                LabelValue::Label(s) => Ok(interner.code(s)),
                other => Err(mismatch(other)),
            })
            .collect::<Result<_>>()
            .map(Values::Labels),
        ValueKind::Real => values
            .iter()
            .map(|v| match v {
                LabelValue::Real(x) if x.is_finite() => Ok(*x),
                LabelValue::Real(x) => Err(Error::Type(format!("{source} holds non-finite value {x}"))),
                other => Err(mismatch(other)),
            })
            .collect::<Result<_>>()
            .map(Values::Reals),
    }
}
