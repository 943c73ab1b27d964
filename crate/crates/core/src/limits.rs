/// Environment variable that overrides every size guard with a single value.
pub const WORK_LIMIT_ENV: &str = "CAPACITY_LAB_WORK_LIMIT";

pub const DEFAULT_MAX_STATES: u64 = 1 << 31;
pub const DEFAULT_WORK_LIMIT: u64 = 1 << 30;
pub const DEFAULT_SUCCESSOR_CACHE: u64 = 100_000_000;

/// Size guards consulted before anything large is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest state space an operator may be built over.
    pub max_states: u64,
    /// Largest number of partial assignments a brute-force count may visit.
    pub work_limit: u64,
    /// A one-vertex successor table is cached only up to this many entries.
    pub successor_cache_entries: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_states: DEFAULT_MAX_STATES,
            work_limit: DEFAULT_WORK_LIMIT,
            successor_cache_entries: DEFAULT_SUCCESSOR_CACHE,
        }
    }
}

impl Limits {
    /// Defaults, with `max_states` and `work_limit` replaced by `CAPACITY_LAB_WORK_LIMIT` when set.
    pub fn from_env() -> Self {
        let mut limits = Self::default();
        if let Some(v) = std::env::var(WORK_LIMIT_ENV).ok().and_then(|s| s.trim().parse::<u64>().ok()) {
            limits.max_states = v;
            limits.work_limit = v;
        }
        limits
    }
}
