use sha2::{Digest, Sha256};

/// Hashes a label path into a 64-bit seed. Distinct paths give independent
/// streams, so results never depend on the order runs are executed in.
pub fn derive_seed(master: u64, task: &str, path: &[u64]) -> u64 {
    let mut h = Sha256::new();
    h.update(b"srcsel-seed");
    h.update(master.to_le_bytes());
    h.update((task.len() as u64).to_le_bytes());
    h.update(task.as_bytes());
    for p in path {
        h.update(p.to_le_bytes());
    }
    let out = h.finalize();
    u64::from_le_bytes(out[..8].try_into().expect("digest has 32 bytes"))
}

/// Seeds for the runs of one search step.
#[derive(Debug, Clone, Copy)]
pub struct RunSeeds<'a> {
    pub master: u64,
    pub task: &'a str,
    /// Search step; 0 is the baseline.
    pub step: usize,
}

impl RunSeeds<'_> {
    pub fn run(&self, r: usize) -> u64 {
        derive_seed(self.master, self.task, &[self.step as u64, r as u64])
    }
}

/// Seed for one held-out fold inside a run.
pub fn fold_seed(run_seed: u64, fold: usize) -> u64 {
    derive_seed(run_seed, "fold", &[fold as u64])
}
