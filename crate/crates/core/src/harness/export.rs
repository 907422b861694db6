use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use super::render::write_output;
use crate::error::{Error, Result};
use crate::fockrep::build_rep;
use crate::grassmann::{realization_matrix, GrassmannOperator};
use crate::operator::FockOperator;
use crate::phase::{exp_phase_shift, phase_operator, phase_states, quon_phase, PhaseConfig, Sign};
use crate::qcore::DeformationParams;
use crate::symmetry::{build_pair, uqsl2_generators};

#[derive(Serialize)]
struct MatrixDump {
    k: usize,
    theta0: f64,
    /// Row-major `[re, im]` pairs keyed by operator name.
    matrices: BTreeMap<&'static str, FockOperator>,
}

/// Every operator constructed for `k` and reference angle `theta0`, as JSON.
pub fn matrices_json(k: usize, theta0: f64) -> Result<String> {
    let params = DeformationParams::new(k)?;
    let cfg = PhaseConfig::new(k, theta0)?;
    let rep = build_rep(params);
    let basis = phase_states(k, &cfg)?;
    let pair = build_pair(&rep, &cfg)?;

    let mut matrices = BTreeMap::new();
    matrices.insert("a_minus", rep.a_minus.clone());
    matrices.insert("a_plus", rep.a_plus.clone());
    matrices.insert("a_plus_dag", rep.a_plus_dag.clone());
    matrices.insert("a_minus_dag", rep.a_minus_dag.clone());
    matrices.insert("number", rep.number_op.clone());
    for (name, op) in [
        ("realization_mul_z", GrassmannOperator::MulZ),
        ("realization_mul_zbar", GrassmannOperator::MulZbar),
        ("realization_d_z", GrassmannOperator::Dz),
        ("realization_d_zbar", GrassmannOperator::Dzbar),
    ] {
        matrices.insert(name, realization_matrix(&op, params)?);
    }
    matrices.insert("phase_basis", basis.matrix());
    matrices.insert("phi", phase_operator(&basis));
    matrices.insert("exp_plus_i_phi", exp_phase_shift(&cfg, Sign::Plus));
    matrices.insert("exp_minus_i_phi", exp_phase_shift(&cfg, Sign::Minus));
    matrices.insert("quon_exp_plus_i_phi", quon_phase(&rep, &cfg, Sign::Plus));
    matrices.insert("quon_exp_minus_i_phi", quon_phase(&rep, &cfg, Sign::Minus));
    matrices.insert("U", pair.u.clone());
    matrices.insert("V", pair.v.clone());
    matrices.insert("X", pair.x.clone());
    matrices.insert("Y", pair.y.clone());
    matrices.insert("U_inv", pair.u_inv.clone());
    matrices.insert("V_inv", pair.v_inv.clone());
    if let Ok(gens) = uqsl2_generators(&pair, &params) {
        matrices.insert("J_plus", gens.j_plus);
        matrices.insert("J_minus", gens.j_minus);
        matrices.insert("K", gens.k);
        matrices.insert("K_inv", gens.k_inv);
    }
    let mut text = serde_json::to_string_pretty(&MatrixDump { k, theta0, matrices })
        .map_err(|e| Error::Config(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn export_matrices(k: usize, theta0: f64, path: &Path) -> Result<()> {
    write_output(&matrices_json(k, theta0)?, path)
}
