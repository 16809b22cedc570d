use std::collections::HashSet;
use std::sync::Arc;

use rayon::prelude::*;

use super::{instantiate, Instantiation, QueryTemplate};
use crate::hashing::stable_u64;
use crate::table_store::{Table, TableStore};

/// A (table, template) pair stops being sampled after this many duplicate
/// instantiations in a row.
const MAX_CONSECUTIVE_DUPLICATES: u32 = 32;

#[derive(Clone, Copy, Default)]
struct PairState {
    exhausted: bool,
    duplicates: u32,
}

/// Instantiate templates over the store until `quota` unique
/// (query_text, table_id) pairs are produced or every pair is exhausted.
///
/// Work proceeds in passes. Pass `k` visits every (table, template) pair
/// once along diagonals, so each table and each template gets equal turns
/// before any pair is revisited. Within a diagonal the tables are filled in
/// parallel and merged in table-id order, which keeps the output independent
/// of thread scheduling.
pub fn generate_batch(
    templates: &[QueryTemplate],
    store: &TableStore,
    quota: usize,
    seed: u64,
) -> Vec<Instantiation> {
    let tables: Vec<&Arc<Table>> = store.iter().collect();
    let p = templates.len();
    let mut out = Vec::with_capacity(quota.min(1 << 20));
    if quota == 0 || p == 0 || tables.is_empty() {
        return out;
    }
    let mut state = vec![PairState::default(); tables.len() * p];
    let mut seen: HashSet<(String, String)> = HashSet::new();
    let mut live = state.len();

    for pass in 0u64.. {
        let pass_seed = stable_u64(&[&seed.to_le_bytes(), &pass.to_le_bytes()]);
        for diag in 0..p {
            let results: Vec<Option<(usize, Option<Instantiation>)>> = tables
                .par_iter()
                .enumerate()
                .map(|(b, table)| {
                    let t = (diag + b) % p;
                    let slot = b * p + t;
                    if state[slot].exhausted {
                        return None;
                    }
                    Some((slot, instantiate(&templates[t], table, pass_seed).ok()))
                })
                .collect();
            for (slot, inst) in results.into_iter().flatten() {
                let st = &mut state[slot];
                match inst {
                    None => {
                        st.exhausted = true;
                        live -= 1;
                    }
                    Some(inst) => {
                        let key = (inst.query_text.clone(), inst.table_id.clone());
                        if seen.insert(key) {
                            st.duplicates = 0;
                            out.push(inst);
                            if out.len() == quota {
                                return out;
                            }
                        } else {
                            st.duplicates += 1;
                            if st.duplicates >= MAX_CONSECUTIVE_DUPLICATES {
                                st.exhausted = true;
                                live -= 1;
                            }
                        }
                    }
                }
            }
            if live == 0 {
                return out;
            }
        }
    }
    out
}
