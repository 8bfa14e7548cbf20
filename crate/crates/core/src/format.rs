//! JSON file formats for classes, samples, distributions and compression
//! descriptors. Rendering is deterministic: map keys are sorted, field order
//! is fixed, and the same value always prints the same bytes.
//!
//! Class file:
//! ```json
//! {
//!   "domain": ["a", "b"],
//!   "labels": ["0", "1"],
//!   "k": 1,
//!   "concepts": [
//!     { "name": "c0", "values": { "a": ["0"], "b": null } }
//!   ]
//! }
//! ```
//! `null` marks a point where the concept is undefined. A point missing from
//! `values` is treated the same way on input; output always lists every point.
//!
//! Sample file: `{ "pairs": [["a", "0"], ["b", "1"]] }` (order preserved,
//! repetitions allowed). Distribution file:
//! `{ "support": [["a", "0", 0.5], ["b", "1", 0.5]] }`; probabilities must be
//! nonnegative and sum to 1 within 1e-12.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ConceptClass, DiscreteDistribution, Domain, LabelSpace, ListConcept, Sample};

#[derive(Serialize, Deserialize)]
struct ClassFile {
    domain: Vec<String>,
    labels: Vec<String>,
    k: usize,
    concepts: Vec<ConceptFile>,
}

#[derive(Serialize, Deserialize)]
struct ConceptFile {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    name: Option<String>,
    values: BTreeMap<String, Option<Vec<String>>>,
}

#[derive(Serialize, Deserialize)]
struct SampleFile {
    pairs: Vec<(String, String)>,
}

#[derive(Serialize, Deserialize)]
struct DistFile {
    support: Vec<(String, String, f64)>,
}

/// Parameters that reconstruct a boosted compression scheme: the class file
/// it belongs to is supplied separately.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SchemeDescriptor {
    /// List size of reconstructed hypotheses.
    pub k: usize,
    /// Block length: the base learner's sample size.
    pub block: usize,
    /// Error budget the base learner was validated against.
    pub epsilon: f64,
    /// Master seed for hypothesis draws.
    pub seed: u64,
    /// Base learner id; only "erm" is defined.
    pub learner: String,
}

fn jerr(e: serde_json::Error) -> Error {
    Error::Format(e.to_string())
}

pub fn parse_class(text: &str) -> Result<ConceptClass> {
    let file: ClassFile = serde_json::from_str(text).map_err(jerr)?;
    let domain = Domain::new(file.domain)?;
    let labels = LabelSpace::new(file.labels)?;
    let mut concepts = Vec::with_capacity(file.concepts.len());
    for cf in file.concepts {
        for point in cf.values.keys() {
            if domain.index_of(point).is_none() {
                return Err(Error::Format(format!("unknown point {point:?} in concept")));
            }
        }
        let mut values = Vec::with_capacity(domain.len());
        for p in 0..domain.len() {
            let entry = cf.values.get(domain.point(p));
            let value = match entry {
                None | Some(None) => None,
                Some(Some(names)) => {
                    let mut list = Vec::with_capacity(names.len());
                    for name in names {
                        let idx = labels.index_of(name).ok_or_else(|| {
                            Error::Format(format!("unknown label {name:?} in concept"))
                        })?;
                        list.push(idx);
                    }
                    Some(list)
                }
            };
            values.push(value);
        }
        concepts.push(ListConcept::new(cf.name, values));
    }
    ConceptClass::new(None, domain, labels, file.k, concepts)
}

pub fn render_class(class: &ConceptClass) -> String {
    let file = ClassFile {
        domain: class.domain().names().to_vec(),
        labels: class.labels().names().to_vec(),
        k: class.k(),
        concepts: class
            .concepts()
            .iter()
            .map(|c| ConceptFile {
                name: c.name().map(str::to_owned),
                values: (0..class.domain().len())
                    .map(|p| {
                        let entry = c.value(p).map(|list| {
                            list.iter()
                                .map(|&l| class.labels().label(l).to_owned())
                                .collect()
                        });
                        (class.domain().point(p).to_owned(), entry)
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("class serializes")
}

pub fn parse_sample(text: &str, class: &ConceptClass) -> Result<Sample> {
    let file: SampleFile = serde_json::from_str(text).map_err(jerr)?;
    let mut pairs = Vec::with_capacity(file.pairs.len());
    for (point, label) in &file.pairs {
        let x = class
            .domain()
            .index_of(point)
            .ok_or_else(|| Error::Format(format!("unknown point {point:?} in sample")))?;
        let y = class
            .labels()
            .index_of(label)
            .ok_or_else(|| Error::Format(format!("unknown label {label:?} in sample")))?;
        pairs.push((x, y));
    }
    Ok(Sample::new(pairs))
}

pub fn render_sample(s: &Sample, class: &ConceptClass) -> String {
    let file = SampleFile {
        pairs: s
            .pairs()
            .iter()
            .map(|&(x, y)| {
                (
                    class.domain().point(x).to_owned(),
                    class.labels().label(y).to_owned(),
                )
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("sample serializes")
}

pub fn parse_distribution(text: &str, class: &ConceptClass) -> Result<DiscreteDistribution> {
    let file: DistFile = serde_json::from_str(text).map_err(jerr)?;
    let mut support = Vec::with_capacity(file.support.len());
    for (point, label, p) in &file.support {
        let x = class
            .domain()
            .index_of(point)
            .ok_or_else(|| Error::Format(format!("unknown point {point:?} in distribution")))?;
        let y = class
            .labels()
            .index_of(label)
            .ok_or_else(|| Error::Format(format!("unknown label {label:?} in distribution")))?;
        support.push((x, y, *p));
    }
    DiscreteDistribution::new(support)
}

pub fn render_distribution(d: &DiscreteDistribution, class: &ConceptClass) -> String {
    let file = DistFile {
        support: d
            .support()
            .iter()
            .map(|&(x, y, p)| {
                (
                    class.domain().point(x).to_owned(),
                    class.labels().label(y).to_owned(),
                    p,
                )
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("distribution serializes")
}

pub fn parse_scheme_descriptor(text: &str) -> Result<SchemeDescriptor> {
    serde_json::from_str(text).map_err(jerr)
}

pub fn render_scheme_descriptor(d: &SchemeDescriptor) -> String {
    serde_json::to_string_pretty(d).expect("descriptor serializes")
}
