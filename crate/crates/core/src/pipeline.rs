//! End-to-end model building from a raw dataset.

use crate::cba::post_prune;
use crate::data::Dataset;
use crate::discretize::{mdlp_discretize, DiscretizationMap};
use crate::error::Result;
use crate::miner::{mine_car_rules, MinerParams};
use crate::qcba::{optimize, QcbaConfig};
use crate::rule::RuleList;

/// Discretization and rule lists learnt on one training set.
#[derive(Debug, Clone)]
pub struct CbaModels {
    pub map: DiscretizationMap,
    /// CBA classifier over bin labels.
    pub classifier: RuleList,
    /// Data coverage pruned rules without the default rule cut; the input
    /// for postprocessing.
    pub for_tuning: RuleList,
}

impl CbaModels {
    /// The CBA classifier with bin labels rewritten as raw intervals, usable
    /// on raw data directly.
    pub fn raw_classifier(&self) -> Result<RuleList> {
        self.map.translate(&self.classifier)
    }
}

/// Discretize with MDLP, mine rules on the binned data and prune them.
pub fn build_cba(raw: &Dataset, params: &MinerParams) -> Result<CbaModels> {
    let map = mdlp_discretize(raw);
    let binned = map.apply(raw)?;
    let mined = mine_car_rules(&binned, params)?;
    let classifier = post_prune(&mined, &binned, false)?;
    let for_tuning = post_prune(&mined, &binned, true)?;
    Ok(CbaModels {
        map,
        classifier,
        for_tuning,
    })
}

/// Build a CBA model and postprocess it with `cfg`.
pub fn build_qcba(raw: &Dataset, params: &MinerParams, cfg: &QcbaConfig) -> Result<RuleList> {
    let cba = build_cba(raw, params)?;
    optimize(&cba.for_tuning, raw, Some(&cba.map), cfg)
}
