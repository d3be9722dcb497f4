use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Deserialize;

use super::criteria::{cd_i, cd_ii, cd_iii, cm_i, cm_ii, cm_iii, six_divides_level};
use super::elimination::eliminate;
use super::{BoundReport, Criterion, Status, TrailEntry, SCHEMA_VERSION};
use crate::arith::{ExtNat, Level};
use crate::cdgraph::BadFiber;
use crate::error::{invalid, invariant, Result};
use crate::shimura::{eichler_class_number, genus};

/// Externally supplied point counts |M₀(D,N)_ℓ(F_ℓ)|, keyed by (D, N).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PointCounts {
    counts: BTreeMap<(u64, u64), Vec<(u64, u64)>>,
}

#[derive(Deserialize)]
struct PointRow {
    #[serde(rename = "D")]
    d: u64,
    #[serde(rename = "N")]
    n: u64,
    ell: u64,
    count: u64,
}

impl PointCounts {
    pub fn insert(&mut self, d: u64, n: u64, ell: u64, count: u64) {
        self.counts.entry((d, n)).or_default().push((ell, count));
    }

    pub fn get(&self, level: &Level) -> &[(u64, u64)] {
        self.counts
            .get(&(level.d(), level.n()))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// CSV with header `D,N,ell,count`.
    pub fn from_csv<R: std::io::Read>(reader: R) -> Result<PointCounts> {
        let mut out = PointCounts::default();
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        for row in rdr.deserialize::<PointRow>() {
            let row = row.map_err(|e| invalid!("point-count file: {e}"))?;
            out.insert(row.d, row.n, row.ell, row.count);
        }
        Ok(out)
    }
}

fn record(trail: &mut Vec<TrailEntry>, r: u64, entry: TrailEntry) -> Result<()> {
    if entry.bound < ExtNat::Finite(r) {
        return Err(invariant!(
            "{} gave s ≤ {} below r = {r}",
            entry.criterion,
            entry.bound
        ));
    }
    trail.push(entry);
    Ok(())
}

fn best(trail: &[TrailEntry]) -> ExtNat {
    trail
        .iter()
        .map(|e| e.bound)
        .min()
        .unwrap_or(ExtNat::Infinite)
}

pub fn bound_pipeline(level: &Level) -> Result<BoundReport> {
    bound_pipeline_with(level, &PointCounts::default())
}

/// All criteria, cheapest first; the dual-graph elimination only runs if
/// s = r is not yet proved.
pub fn bound_pipeline_with(level: &Level, points: &PointCounts) -> Result<BoundReport> {
    let g = genus(level)?;
    let r = level.r() as u64;
    let mut report = BoundReport {
        schema_version: SCHEMA_VERSION,
        d: level.d(),
        n: level.n(),
        genus: g,
        r: level.r(),
        s_upper: ExtNat::Infinite,
        status: Status::UnresolvedSmallGenus,
        trail: Vec::new(),
    };
    if g < 2 {
        return Ok(report);
    }
    let trail = &mut report.trail;
    record(
        trail,
        r,
        TrailEntry::new(Criterion::NoEllipticPoints, &[], cm_i(level)?),
    )?;
    for m in [2, 3] {
        record(
            trail,
            r,
            TrailEntry::new(
                Criterion::EllipticVertexStabilizer,
                &[("m", m)],
                cd_i(level, m)?,
            ),
        )?;
    }
    record(
        trail,
        r,
        TrailEntry::new(Criterion::SixDividesLevel, &[], six_divides_level(level)?),
    )?;
    for m in level.atkin_lehner_indices() {
        record(
            trail,
            r,
            TrailEntry::new(Criterion::CmFixedPoints, &[("m", m)], cm_ii(level, m)?),
        )?;
    }
    record(
        trail,
        r,
        TrailEntry::new(Criterion::RiemannHurwitz, &[], cm_iii(level)?),
    )?;
    for &p in level.d_primes().iter().filter(|&&p| p != 2) {
        record(
            trail,
            r,
            TrailEntry::new(Criterion::VertexStabilizer, &[("p", p)], cd_ii(level, p)?),
        )?;
    }
    for &(ell, count) in points.get(level) {
        record(
            trail,
            r,
            TrailEntry::new(
                Criterion::PointCount,
                &[("ell", ell), ("count", count)],
                cd_iii(level, ell, count)?,
            ),
        )?;
    }
    if best(trail) > ExtNat::Finite(r) {
        let mut primes = Vec::new();
        for &p in level.d_primes() {
            primes.push((eichler_class_number(level.d() / p, level.n())?, p));
        }
        primes.sort_unstable();
        for (_, p) in primes {
            let fiber = BadFiber::new(level, p)?;
            let e = eliminate(&fiber, g)?;
            let bound = if e.proves_equality() {
                ExtNat::Finite(r)
            } else {
                ExtNat::Infinite
            };
            let params = [
                ("p", p),
                ("candidates", e.candidates as u64),
                ("survivors", e.survivors.len() as u64),
            ];
            record(
                trail,
                r,
                TrailEntry::new(Criterion::AdmissibleElimination, &params, bound),
            )?;
            if e.proves_equality() {
                break;
            }
        }
    }
    record(
        trail,
        r,
        TrailEntry::new(Criterion::GenusClamp, &[], ExtNat::Finite(r + 1)),
    )?;
    report.s_upper = best(&report.trail);
    report.status = if report.s_upper == ExtNat::Finite(r) {
        Status::Equal
    } else {
        Status::PlusOne
    };
    Ok(report)
}

#[derive(Debug, Clone, Default)]
pub struct SurveyOptions {
    pub points: PointCounts,
    /// Worker threads; `None` uses the global rayon pool.
    pub jobs: Option<usize>,
}

/// Reports for every valid (D, N) with D ≤ max_d, sorted by D.
pub fn survey(max_d: u64, n: u64, options: &SurveyOptions) -> Result<Vec<BoundReport>> {
    let levels: Vec<Level> = (2..=max_d).filter_map(|d| Level::new(d, n).ok()).collect();
    let run = || {
        levels
            .par_iter()
            .map(|l| bound_pipeline_with(l, &options.points))
            .collect::<Result<Vec<_>>>()
    };
    let mut out = match options.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| invalid!("thread pool: {e}"))?
            .install(run)?,
        None => run()?,
    };
    out.sort_by_key(|rep| (rep.d, rep.n));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_examples() {
        let r205 = bound_pipeline(&Level::new(205, 1).unwrap()).unwrap();
        assert_eq!(r205.status, Status::Equal);
        assert_eq!(r205.s_upper, ExtNat::Finite(2));
        let last = r205
            .trail
            .iter()
            .rev()
            .find(|e| e.criterion != Criterion::GenusClamp)
            .unwrap();
        assert_eq!(last.criterion, Criterion::AdmissibleElimination);
        assert_eq!(last.params["p"], 5);
        let r6 = bound_pipeline(&Level::new(6, 1).unwrap()).unwrap();
        assert_eq!(r6.status, Status::UnresolvedSmallGenus);
        assert!(r6.trail.is_empty());
    }

    #[test]
    fn report_round_trips() {
        let rep = bound_pipeline(&Level::new(26, 1).unwrap()).unwrap();
        let json = serde_json::to_string(&rep).unwrap();
        assert!(json.contains("\"schema_version\":1") && json.contains("\"D\":26"));
        let back: BoundReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rep);
    }

    #[test]
    fn point_counts_csv() {
        let pc = PointCounts::from_csv("D,N,ell,count\n205,1,3,6\n".as_bytes()).unwrap();
        assert_eq!(pc.get(&Level::new(205, 1).unwrap()), &[(3, 6)]);
        assert!(PointCounts::from_csv("D,N\nx,1\n".as_bytes()).is_err());
    }
}
