//! Gene-level combination of SNP association tests on a 1000 case / 1000
//! control design.
//!
//! Each SNP is tested by the number of cases among its variant carriers,
//! which is hypergeometric under the null.

use anyhow::Result;
use pcomb_core::{
    combine_observations, pvalue_distribution, DiscretePValueDist, Method, ModelSpec, Side,
    StatisticModel,
};
use serde::Serialize;

pub const CASES: u64 = 1000;
pub const CONTROLS: u64 = 1000;

/// Variant carriers per SNP.
pub const CARRIERS: [u64; 15] = [19, 16, 16, 10, 13, 12, 10, 12, 11, 16, 19, 9, 14, 8, 7];
/// Carriers that are cases.
pub const CASE_CARRIERS: [i64; 15] = [13, 11, 11, 7, 9, 8, 7, 8, 8, 11, 10, 3, 6, 5, 4];

/// Gene 1 holds SNPs 1 to 5, gene 2 SNPs 6 to 15 (zero-based ranges here).
pub const GENES: [(u8, std::ops::Range<usize>); 2] = [(1, 0..5), (2, 5..15)];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneRow {
    pub gene: u8,
    pub side: &'static str,
    pub method: &'static str,
    #[serde(rename = "S")]
    pub statistic: f64,
    pub p: f64,
}

pub fn snp_model(carriers: u64) -> Result<StatisticModel> {
    Ok(StatisticModel::new(ModelSpec::Hypergeometric {
        population: CASES + CONTROLS,
        successes: CASES,
        draws: carriers,
    })?)
}

/// Statistic and global p-value for every gene, side and method: 30 rows,
/// ordered by gene, then side (two, right, left), then method.
pub fn gene_example() -> Result<Vec<GeneRow>> {
    let mut rows = Vec::with_capacity(30);
    for (gene, snps) in GENES {
        for side in [Side::Two, Side::Right, Side::Left] {
            let dists = snps
                .clone()
                .map(|s| Ok(pvalue_distribution(&snp_model(CARRIERS[s])?, side)))
                .collect::<Result<Vec<DiscretePValueDist>>>()?;
            let obs = &CASE_CARRIERS[snps.clone()];
            for method in Method::ALL {
                let r = combine_observations(method, obs, &dists)?;
                rows.push(GeneRow {
                    gene,
                    side: side.name(),
                    method: method.name(),
                    statistic: r.statistic,
                    p: r.global_p,
                });
            }
        }
    }
    Ok(rows)
}

pub fn gene_rows_to_csv(rows: &[GeneRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["gene", "side", "method", "S", "p"])?;
    for r in rows {
        w.write_record([
            r.gene.to_string(),
            r.side.to_string(),
            r.method.to_string(),
            format!("{:.6}", r.statistic),
            format!("{:.6}", r.p),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}
