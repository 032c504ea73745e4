use super::instance::Violation;
use crate::format::Instance;

/// Every broken invariant of `inst`; empty iff the instance is well formed.
pub fn validate(inst: &Instance) -> Vec<Violation> {
    match inst {
        Instance::Pb(i) => i.violations(),
        Instance::Pbt(i) => i.violations(),
        Instance::Dt(i) => i.violations(),
        Instance::Msscf(i) => i.violations(),
        Instance::Mixture(i) => i.violations(),
    }
}
