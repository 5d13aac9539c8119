//! Closed-form parameter accounting.

use crate::config::SchConfig;

/// Full count versus the inference count with intermediate HR heads
/// bypassed (they never contribute to the final output, so they can be
/// dropped at test time).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMode {
    Full,
    TestBypassed,
}

fn conv(in_ch: usize, out_ch: usize) -> u64 {
    (out_ch * in_ch * 9 + out_ch) as u64
}

/// Exact scalar-parameter count for a configuration. The reference x4
/// configuration totals 6,310,840 full and 2,162,787 test-bypassed.
pub fn param_count(config: &SchConfig, mode: CountMode) -> u64 {
    let c = config.channels;
    let s2 = config.scale_factor * config.scale_factor;
    let entry_stage = conv(3, c) + 2 * conv(c, c);
    let head = conv(c, c * s2) + conv(c, 3);
    let branch = conv(c, c) + conv(c, 2);
    let module = config.n_maps as u64 * branch + conv(c * (config.n_maps + 1), c) + head;

    let full = if config.n_modules == 0 {
        entry_stage + head
    } else {
        entry_stage + config.n_modules as u64 * module
    };
    match mode {
        CountMode::Full => full,
        CountMode::TestBypassed => full - config.n_modules.saturating_sub(1) as u64 * head,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_x4_counts_match_the_known_totals() {
        let cfg = SchConfig::reference(4);
        assert_eq!(param_count(&cfg, CountMode::Full), 6_310_840);
        assert_eq!(param_count(&cfg, CountMode::TestBypassed), 2_162_787);
    }

    #[test]
    fn zero_module_count_is_entry_plus_one_head() {
        let cfg = SchConfig {
            channels: 64,
            n_modules: 0,
            n_maps: 0,
            scale_factor: 4,
            leaky_slope: 0.2,
        };
        // entry stage 75,648 plus a single head 592,579
        assert_eq!(param_count(&cfg, CountMode::Full), 75_648 + 592_579);
        assert_eq!(
            param_count(&cfg, CountMode::Full),
            param_count(&cfg, CountMode::TestBypassed)
        );
    }
}
