//! Upper bounds on s, where |Aut(X₀(D,N))| = 2^s, and the report that
//! records how each bound was obtained.
//!
//! The Atkin-Lehner group has order 2^r, so s ≥ r always; when the genus
//! is at least 2 all automorphisms are involutions defined over Q and
//! s ≤ r + 1.

mod criteria;
mod elimination;
mod pipeline;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{ExtNat, Level};

pub use criteria::{cd_i, cd_ii, cd_iii, cm_i, cm_ii, cm_iii, six_divides_level};
pub use elimination::{
    candidate_vertex_perms, eliminate, is_admissible, minimal_extension, orbit_sizes_feasible,
    stabilizer_bound, Elimination, GraphAut,
};
pub use pipeline::{bound_pipeline, bound_pipeline_with, survey, PointCounts, SurveyOptions};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    /// s = r: every automorphism is an Atkin-Lehner involution.
    Equal,
    /// Only s ≤ r + 1 is known.
    PlusOne,
    /// Genus 0 or 1, where the group is infinite or not 2-elementary.
    UnresolvedSmallGenus,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Equal => "EQUAL",
            Status::PlusOne => "PLUS_ONE",
            Status::UnresolvedSmallGenus => "UNRESOLVED_SMALL_GENUS",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// No elliptic points of order 2 and 3 can coexist with an exceptional automorphism.
    NoEllipticPoints,
    /// Stabilizers of the vertices of length 2 or 3.
    EllipticVertexStabilizer,
    SixDividesLevel,
    /// Fixed points of ω_m are CM points.
    CmFixedPoints,
    /// Riemann-Hurwitz on X → X/Aut(X).
    RiemannHurwitz,
    /// Stabilizers of the vertices of V in the dual graph at odd p | D.
    VertexStabilizer,
    /// Rational points of the reduction at ℓ ∤ 2DN.
    PointCount,
    /// Admissible automorphisms of the stable graph at p | D.
    AdmissibleElimination,
    /// s ≤ r + 1 once the genus is at least 2.
    GenusClamp,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("criterion serializes");
        f.write_str(s.as_str().unwrap_or("?"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrailEntry {
    pub criterion: Criterion,
    pub params: BTreeMap<String, u64>,
    /// `None` when the criterion gave no information.
    pub bound: ExtNat,
}

impl TrailEntry {
    pub fn new(criterion: Criterion, params: &[(&str, u64)], bound: ExtNat) -> TrailEntry {
        TrailEntry {
            criterion,
            params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub schema_version: u32,
    #[serde(rename = "D")]
    pub d: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub genus: u64,
    pub r: u32,
    pub s_upper: ExtNat,
    pub status: Status,
    pub trail: Vec<TrailEntry>,
}

impl BoundReport {
    pub fn level(&self) -> Level {
        Level::new(self.d, self.n).expect("report carries a valid level")
    }

    pub fn is_resolved(&self) -> bool {
        self.status == Status::Equal
    }

    /// The trail entry that produced `s_upper`, if any.
    pub fn deciding_entry(&self) -> Option<&TrailEntry> {
        self.trail.iter().find(|e| e.bound == self.s_upper)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "D = {}, N = {}: genus {}, r = {}, s ≤ {}, {}\n",
            self.d, self.n, self.genus, self.r, self.s_upper, self.status
        );
        for e in &self.trail {
            let params: Vec<String> = e.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str(&format!(
                "  {:<28} {:<20} {}\n",
                e.criterion.to_string(),
                params.join(" "),
                e.bound
            ));
        }
        out
    }
}
