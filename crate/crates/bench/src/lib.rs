//! Fixtures shared by the benches.

use liegeo_core::carrier::DEFAULT_BUDGET;
use liegeo_core::{parse_system, AlgebraKind, CarrierSpec, CoeffAlgebra, EquationSystem, Factor, FieldSpec, FreeLie, Parallelepipedon, Setting};

pub fn setting(kind: AlgebraKind, p: u64, window: usize, term_degree: usize) -> Setting {
    let spec = match kind {
        AlgebraKind::Metabelian => CarrierSpec::Metabelian { rank: 2 },
        _ => CarrierSpec::Free { rank: 2 },
    };
    Setting::new(CoeffAlgebra::new(kind, 2, FieldSpec::Prime(p)), spec, window, term_degree, DEFAULT_BUDGET).expect("bench setting")
}

/// One-variable system over rank 2; equations separated by `;`.
pub fn system(kind: &str, p: u64, eqs: &str) -> EquationSystem {
    let mut text = format!("algebra {kind} rank=2 field=GF({p})\nvars x\n");
    for e in eqs.split(';') {
        text.push_str(&format!("eq {} = 0\n", e.trim()));
    }
    parse_system(&text).expect("bench system")
}

/// lin{a1, [a1,a2]} over GF(p).
pub fn plane(p: u64) -> Parallelepipedon {
    let f = FreeLie::new(2, FieldSpec::Prime(p));
    let (a1, a2) = (f.generator(0), f.generator(1));
    let basis = vec![a1.clone(), a1.bracket(&a2).expect("bracket")];
    let alg = CoeffAlgebra::new(AlgebraKind::Free, 2, FieldSpec::Prime(p));
    Parallelepipedon::new(alg, vec!["x".into()], vec![Factor { basis, shift: f.zero() }]).expect("plane")
}
