//! Class algebra: pairwise products, powers, disambiguations of partial
//! classes, and selection expansion of list classes.
//!
//! Product points and labels are named by joining the factor names as
//! `(left|right)`. Backslash and the pipe are escaped inside the halves, so
//! the encoding nests and decodes unambiguously.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::learning::LearningRule;
use crate::model::{Caps, ConceptClass, Domain, LabelSpace, ListConcept, ListHypothesis, Sample};

pub fn encode_pair(left: &str, right: &str) -> String {
    fn esc(s: &str) -> String {
        let mut out = String::with_capacity(s.len());
        for ch in s.chars() {
            if ch == '\\' || ch == '|' {
                out.push('\\');
            }
            out.push(ch);
        }
        out
    }
    format!("({}|{})", esc(left), esc(right))
}

pub fn decode_pair(s: &str) -> Result<(String, String)> {
    let inner = s
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::Format(format!("pair identifier {s:?} lacks parentheses")))?;
    let mut left = String::new();
    let mut right = String::new();
    let mut target = &mut left;
    let mut split = false;
    let mut chars = inner.chars();
    while let Some(ch) = chars.next() {
        match ch {
            '\\' => match chars.next() {
                Some(next) => target.push(next),
                None => return Err(Error::Format(format!("dangling escape in {s:?}"))),
            },
            '|' => {
                if split {
                    return Err(Error::Format(format!("multiple separators in {s:?}")));
                }
                split = true;
                target = &mut right;
            }
            other => target.push(other),
        }
    }
    if !split {
        return Err(Error::Format(format!("no separator in {s:?}")));
    }
    Ok((left, right))
}

/// Which factor of a product to project onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A materialized product class together with the index arithmetic linking
/// it back to its factors. Point `(u, v)` sits at index `u * |V| + v`, and
/// label `(y, z)` at `y * |Z| + z`, matching the name tables.
#[derive(Debug, Clone)]
pub struct ProductClass {
    class: ConceptClass,
    left_points: usize,
    right_points: usize,
    left_labels: usize,
    right_labels: usize,
}

impl ProductClass {
    pub fn class(&self) -> &ConceptClass {
        &self.class
    }

    pub fn into_class(self) -> ConceptClass {
        self.class
    }

    pub fn point_index(&self, u: usize, v: usize) -> usize {
        u * self.right_points + v
    }

    pub fn point_parts(&self, p: usize) -> (usize, usize) {
        (p / self.right_points, p % self.right_points)
    }

    pub fn label_index(&self, y: usize, z: usize) -> usize {
        y * self.right_labels + z
    }

    pub fn label_parts(&self, l: usize) -> (usize, usize) {
        (l / self.right_labels, l % self.right_labels)
    }

    pub fn left_points(&self) -> usize {
        self.left_points
    }

    pub fn right_points(&self) -> usize {
        self.right_points
    }

    pub fn left_labels(&self) -> usize {
        self.left_labels
    }

    pub fn right_labels(&self) -> usize {
        self.right_labels
    }

    /// Projects a product sample onto one factor, pair by pair.
    pub fn project_sample(&self, s: &Sample, side: Side) -> Sample {
        let pairs = s
            .pairs()
            .iter()
            .map(|&(p, l)| {
                let (u, v) = self.point_parts(p);
                let (y, z) = self.label_parts(l);
                match side {
                    Side::Left => (u, y),
                    Side::Right => (v, z),
                }
            })
            .collect();
        Sample::new(pairs)
    }
}

/// The product class: concepts are all pairs `(f, g)`, defined at `(u, v)`
/// exactly when both halves are defined, with the list of all label pairs
/// drawn from `f(u)` and `g(v)`. List size multiplies.
pub fn product(left: &ConceptClass, right: &ConceptClass, caps: &Caps) -> Result<ProductClass> {
    let points = left.domain().len().checked_mul(right.domain().len());
    let labels = left.labels().len().checked_mul(right.labels().len());
    match (points, labels) {
        (Some(p), Some(l)) if p <= caps.product_cells && l <= caps.product_cells => {}
        _ => {
            let needed = points
                .unwrap_or(usize::MAX)
                .max(labels.unwrap_or(usize::MAX));
            return Err(Error::capacity(
                "product table",
                needed as u128,
                caps.product_cells as u128,
            ));
        }
    }
    let domain = Domain::new(
        left.domain()
            .names()
            .iter()
            .cartesian_product(right.domain().names())
            .map(|(a, b)| encode_pair(a, b))
            .collect(),
    )?;
    let labels = LabelSpace::new(
        left.labels()
            .names()
            .iter()
            .cartesian_product(right.labels().names())
            .map(|(a, b)| encode_pair(a, b))
            .collect(),
    )?;
    let right_labels = right.labels().len();
    let mut concepts = Vec::with_capacity(left.len() * right.len());
    for f in left.concepts() {
        for g in right.concepts() {
            let mut values = Vec::with_capacity(domain.len());
            for u in 0..left.domain().len() {
                for v in 0..right.domain().len() {
                    let value = match (f.value(u), g.value(v)) {
                        (Some(ys), Some(zs)) => Some(
                            ys.iter()
                                .cartesian_product(zs.iter())
                                .map(|(&y, &z)| y * right_labels + z)
                                .collect(),
                        ),
                        _ => None,
                    };
                    values.push(value);
                }
            }
            let name = match (f.name(), g.name()) {
                (Some(a), Some(b)) => Some(encode_pair(a, b)),
                _ => None,
            };
            concepts.push(ListConcept::new(name, values));
        }
    }
    let class = ConceptClass::new(None, domain, labels, left.k() * right.k(), concepts)?;
    Ok(ProductClass {
        class,
        left_points: left.domain().len(),
        right_points: right.domain().len(),
        left_labels: left.labels().len(),
        right_labels,
    })
}

/// Left-associated iterated product. `r = 1` returns the class unchanged.
pub fn power(class: &ConceptClass, r: usize, caps: &Caps) -> Result<ConceptClass> {
    if r == 0 {
        return Err(Error::Format("power exponent must be at least 1".into()));
    }
    let mut acc = class.clone();
    for _ in 1..r {
        acc = product(&acc, class, caps)?.into_class();
    }
    Ok(acc)
}

fn fresh_label(base: String, taken: &mut Vec<String>) -> String {
    let mut name = base.clone();
    let mut counter = 0usize;
    while taken.iter().any(|t| t == &name) {
        counter += 1;
        name = format!("{base}~{counter}");
    }
    taken.push(name.clone());
    name
}

/// Completes each partial concept with its own fresh label, so distinct
/// concepts stay distinct and no new agreements appear on old labels.
/// Total classes come back unchanged.
pub fn free_disambiguation(class: &ConceptClass) -> Result<ConceptClass> {
    if class.k() != 1 {
        return Err(Error::UnsupportedClass(
            "disambiguation is defined for 1-list classes".into(),
        ));
    }
    let mut taken: Vec<String> = class.labels().names().to_vec();
    let mut label_names = class.labels().names().to_vec();
    let mut concepts = Vec::with_capacity(class.len());
    for (ci, c) in class.concepts().iter().enumerate() {
        if c.is_total() {
            concepts.push(c.clone());
            continue;
        }
        let fill = label_names.len();
        label_names.push(fresh_label(format!("\u{0177}#{ci}"), &mut taken));
        let values = (0..class.domain().len())
            .map(|p| Some(c.value(p).map_or(vec![fill], |v| v.to_vec())))
            .collect();
        concepts.push(ListConcept::new(c.name().map(str::to_owned), values));
    }
    ConceptClass::new(
        class.name().map(str::to_owned),
        class.domain().clone(),
        LabelSpace::new(label_names)?,
        1,
        concepts,
    )
}

/// Completes every partial concept with one shared fresh label. Returns the
/// new class and the index of that label when one was added. Total classes
/// come back unchanged.
pub fn minimal_disambiguation(class: &ConceptClass) -> Result<(ConceptClass, Option<usize>)> {
    if class.k() != 1 {
        return Err(Error::UnsupportedClass(
            "disambiguation is defined for 1-list classes".into(),
        ));
    }
    if class.is_total() {
        return Ok((class.clone(), None));
    }
    let mut taken: Vec<String> = class.labels().names().to_vec();
    let mut label_names = class.labels().names().to_vec();
    let star = label_names.len();
    label_names.push(fresh_label("y\u{22c6}".into(), &mut taken));
    let concepts = class
        .concepts()
        .iter()
        .map(|c| {
            let values = (0..class.domain().len())
                .map(|p| Some(c.value(p).map_or(vec![star], |v| v.to_vec())))
                .collect();
            ListConcept::new(c.name().map(str::to_owned), values)
        })
        .collect();
    let out = ConceptClass::new(
        class.name().map(str::to_owned),
        class.domain().clone(),
        LabelSpace::new(label_names)?,
        1,
        concepts,
    )?;
    Ok((out, Some(star)))
}

/// All single-label selections of a total list class: every function
/// obtained by picking one label from each list of one concept.
pub fn selection_class(class: &ConceptClass, caps: &Caps) -> Result<ConceptClass> {
    if !class.is_total() {
        return Err(Error::UnsupportedClass(
            "selection expansion is defined for total classes".into(),
        ));
    }
    let n = class.domain().len();
    let mut needed: u128 = 0;
    let per_concept = (class.k() as u128).saturating_pow(n as u32);
    needed = needed.saturating_add(per_concept.saturating_mul(class.len() as u128));
    if needed > caps.selection_concepts as u128 {
        return Err(Error::capacity(
            "selection expansion",
            needed,
            caps.selection_concepts as u128,
        ));
    }
    let mut concepts = Vec::new();
    for c in class.concepts() {
        let lists: Vec<&[usize]> = (0..n).map(|p| c.value(p).unwrap()).collect();
        for pick in lists
            .iter()
            .map(|l| l.iter().copied())
            .multi_cartesian_product()
        {
            concepts.push(ListConcept::new(
                None,
                pick.into_iter().map(|y| Some(vec![y])).collect(),
            ));
        }
    }
    ConceptClass::new(
        None,
        class.domain().clone(),
        class.labels().clone(),
        1,
        concepts,
    )
}

/// Runs one learner per factor on the projected halves of a product sample
/// and combines the outputs into a product-list hypothesis.
pub fn product_learner(
    product: &ProductClass,
    left: &LearningRule,
    right: &LearningRule,
) -> LearningRule {
    let p = product.clone();
    let left = left.clone();
    let right = right.clone();
    let k = left.k() * right.k();
    LearningRule::new(
        format!("{}*{}", left.name(), right.name()),
        k,
        move |s: &Sample| {
            let hl = left.apply(&p.project_sample(s, Side::Left))?;
            let hr = right.apply(&p.project_sample(s, Side::Right))?;
            let mut lists = Vec::with_capacity(p.left_points * p.right_points);
            for u in 0..p.left_points {
                for v in 0..p.right_points {
                    let list = hl
                        .list(u)
                        .iter()
                        .cartesian_product(hr.list(v).iter())
                        .map(|(&y, &z)| p.label_index(y, z))
                        .collect();
                    lists.push(list);
                }
            }
            ListHypothesis::new(k, lists)
        },
    )
}
