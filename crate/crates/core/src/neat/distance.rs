use super::config::NeatConfig;
use super::genome::{Genome, NodeKind};

/// Compatibility distance:
/// `c_disjoint * non_matching / N + c_weight * (mean |dw| + mean |dbias|)`.
///
/// `non_matching` counts node keys and connection innovations present in
/// only one genome, `N` is the larger connection-gene count (at least 1),
/// weight differences are averaged over matching connections and bias
/// differences over matching non-input nodes.
pub fn genomic_distance(a: &Genome, b: &Genome, cfg: &NeatConfig) -> f64 {
    let mut non_matching = 0usize;

    let mut bias_sum = 0.0;
    let mut bias_n = 0usize;
    for (k, na) in &a.nodes {
        match b.nodes.get(k) {
            Some(nb) => {
                if na.kind != NodeKind::Input {
                    bias_sum += (na.bias - nb.bias).abs();
                    bias_n += 1;
                }
            }
            None => non_matching += 1,
        }
    }
    non_matching += b.nodes.keys().filter(|k| !a.nodes.contains_key(k)).count();

    let mut weight_sum = 0.0;
    let mut weight_n = 0usize;
    for (i, ca) in &a.connections {
        match b.connections.get(i) {
            Some(cb) => {
                weight_sum += (ca.weight - cb.weight).abs();
                weight_n += 1;
            }
            None => non_matching += 1,
        }
    }
    non_matching += b.connections.keys().filter(|i| !a.connections.contains_key(i)).count();

    let n = a.connections.len().max(b.connections.len()).max(1) as f64;
    let mean = |sum: f64, count: usize| if count == 0 { 0.0 } else { sum / count as f64 };
    cfg.compat_coeff_disjoint * non_matching as f64 / n
        + cfg.compat_coeff_weight * (mean(weight_sum, weight_n) + mean(bias_sum, bias_n))
}
