//! Run the bound pipeline for every D up to a limit (default 300) with
//! N = 1 and list the levels where s = r could not be proved.
//!
//!     cargo run --release --example survey -- 1500

use std::time::Instant;

use shimura_aut::autbound::{survey, Criterion, Status, SurveyOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let max_d: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(300);
    let start = Instant::now();
    let reports = survey(max_d, 1, &SurveyOptions::default())?;
    let curves = reports
        .iter()
        .filter(|r| r.status != Status::UnresolvedSmallGenus)
        .count();
    let by_graph = reports
        .iter()
        .filter(|r| {
            r.status == Status::Equal
                && r.deciding_entry().map(|e| e.criterion) == Some(Criterion::AdmissibleElimination)
        })
        .count();
    println!(
        "{} levels, {curves} of genus ≥ 2, {by_graph} settled by the dual graph",
        reports.len()
    );
    for r in reports.iter().filter(|r| r.status == Status::PlusOne) {
        print!("{}", r.to_text());
    }
    println!("elapsed {:.1?}", start.elapsed());
    Ok(())
}
