//! One entry point for every restoration algorithm.

use std::fmt;
use std::str::FromStr;

use crate::augment::{edge_augmentation, AugmentationSet};
use crate::baselines::{block_translation, net_builder};
use crate::error::{Error, Result};
use crate::geom::Instance;
use crate::relocation::{scr, verify_plan, PlanReport, RestorationPlan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    /// Edge augmentation followed by sequential cascaded relocation.
    EaScr,
    /// Net-Builder baseline.
    NetBuilder,
    /// Block Translation baseline (k = 2 only).
    BlockTranslation,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::EaScr, Algorithm::NetBuilder, Algorithm::BlockTranslation];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::EaScr => "eascr",
            Algorithm::NetBuilder => "nb",
            Algorithm::BlockTranslation => "bt",
        }
    }

    pub fn supports(self, k: usize) -> bool {
        k >= 1 && (self != Algorithm::BlockTranslation || k == 2)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eascr" => Ok(Algorithm::EaScr),
            "nb" => Ok(Algorithm::NetBuilder),
            "bt" => Ok(Algorithm::BlockTranslation),
            other => Err(Error::InvalidArgument(format!("unknown algorithm `{other}` (expected eascr, nb or bt)"))),
        }
    }
}

/// A plan plus, for EA-SCR, the augmentation set it realizes.
#[derive(Clone, Debug)]
pub struct Restoration {
    pub algorithm: Algorithm,
    pub k: usize,
    pub plan: RestorationPlan,
    pub augmentation: Option<AugmentationSet>,
}

impl Restoration {
    /// EA-SCR plans must also keep every original link and establish every
    /// augmentation link; baselines are judged on k-connectivity alone.
    pub fn verify(&self, instance: &Instance) -> Result<PlanReport> {
        verify_plan(instance, &self.plan, self.augmentation.as_ref(), self.k)
    }
}

/// EA-SCR: edge augmentation, then sequential cascaded relocation.
pub fn eascr(instance: &Instance, k: usize) -> Result<(AugmentationSet, RestorationPlan)> {
    let aug = edge_augmentation(instance, k)?;
    let plan = scr(instance, &aug)?;
    Ok((aug, plan))
}

pub fn restore(instance: &Instance, k: usize, algorithm: Algorithm) -> Result<Restoration> {
    if !algorithm.supports(k) {
        return Err(Error::Unsupported(format!("{algorithm} does not support k = {k}")));
    }
    let (plan, augmentation) = match algorithm {
        Algorithm::EaScr => {
            let (aug, plan) = eascr(instance, k)?;
            (plan, Some(aug))
        }
        Algorithm::NetBuilder => (net_builder(instance, k)?, None),
        Algorithm::BlockTranslation => (block_translation(instance)?, None),
    };
    Ok(Restoration { algorithm, k, plan, augmentation })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bt_requires_k2() {
        let inst = Instance::planar(1.0, &[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)]).unwrap();
        assert!(matches!(restore(&inst, 3, Algorithm::BlockTranslation), Err(Error::Unsupported(_))));
        for algo in Algorithm::ALL {
            let r = restore(&inst, 2, algo).unwrap();
            let report = r.verify(&inst).unwrap();
            assert!(report.passed(), "{algo}: {}", report.summary());
        }
    }

    #[test]
    fn names_parse() {
        for algo in Algorithm::ALL {
            assert_eq!(algo.name().parse::<Algorithm>().unwrap(), algo);
        }
        assert!("opt".parse::<Algorithm>().is_err());
    }
}
