use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// One density evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerRecord {
    pub seq: u64,
    pub stage: usize,
    pub x: Vec<f64>,
    pub logf: f64,
    pub duration_ms: f64,
}

/// Append-only record of every density evaluation made in a run.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct EvaluationLedger {
    records: Vec<LedgerRecord>,
}

impl EvaluationLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rebuilds a ledger from stored records (e.g. a ledger file).
    pub fn from_records(records: Vec<LedgerRecord>) -> Self {
        EvaluationLedger { records }
    }

    pub fn count(&self) -> usize {
        self.records.len()
    }

    pub fn records(&self) -> &[LedgerRecord] {
        &self.records
    }

    pub(crate) fn push(&mut self, stage: usize, x: Vec<f64>, logf: f64, duration_ms: f64) {
        let seq = self.records.len() as u64;
        self.records.push(LedgerRecord {
            seq,
            stage,
            x,
            logf,
            duration_ms,
        });
    }

    /// Order-sensitive SHA-256 over `(seq, stage, x, logf)` of every record,
    /// as lowercase hex. Durations are excluded.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for r in &self.records {
            h.update(r.seq.to_le_bytes());
            h.update((r.stage as u64).to_le_bytes());
            h.update((r.x.len() as u64).to_le_bytes());
            for v in &r.x {
                h.update(v.to_bits().to_le_bytes());
            }
            h.update(r.logf.to_bits().to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_order_sensitive() {
        let mut a = EvaluationLedger::new();
        a.push(1, vec![0.1, 0.2], -1.0, 0.0);
        a.push(1, vec![0.3, 0.4], -2.0, 0.0);
        let mut b = EvaluationLedger::new();
        b.push(1, vec![0.3, 0.4], -2.0, 0.0);
        b.push(1, vec![0.1, 0.2], -1.0, 0.0);
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest(), a.clone().digest());
        assert_eq!(a.digest().len(), 64);
    }

    #[test]
    fn durations_do_not_affect_digest() {
        let mut a = EvaluationLedger::new();
        a.push(1, vec![0.1], -1.0, 0.0);
        let mut b = EvaluationLedger::new();
        b.push(1, vec![0.1], -1.0, 12.5);
        assert_eq!(a.digest(), b.digest());
    }

    #[test]
    fn sequence_numbers_are_monotone() {
        let mut a = EvaluationLedger::new();
        for i in 0..5 {
            a.push(1, vec![i as f64 / 10.0], 0.0, 0.0);
        }
        assert!(a.records().windows(2).all(|w| w[0].seq < w[1].seq));
        assert_eq!(a.count(), 5);
    }
}
