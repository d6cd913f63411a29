use crate::search::Budget;

use super::SchedulerConfig;

/// Budget for the next assignment given the current job-list length.
///
/// With `size = num_workers + 2`, the depth limit applies while the list
/// is shorter than `size * lmin`, and the node budget is multiplied by
/// `scale` while the list is longer than `size * lmax`. A static config
/// always gets the base values.
pub fn select_budget(joblist_len: usize, config: &SchedulerConfig) -> Budget {
    let kind = config.budget_kind;
    if !config.dynamic_budget {
        return Budget {
            max_depth: config.base_max_depth,
            max_nodes: Some(config.base_max_nodes),
            kind,
        };
    }
    let size = (config.num_workers + 2) as f64;
    let len = joblist_len as f64;
    let max_depth = if len < size * config.lmin {
        config.base_max_depth
    } else {
        None
    };
    let max_nodes = if len > size * config.lmax {
        config.scale.saturating_mul(config.base_max_nodes)
    } else {
        config.base_max_nodes
    };
    Budget {
        max_depth,
        max_nodes: Some(max_nodes),
        kind,
    }
}
