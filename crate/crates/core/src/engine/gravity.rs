//! Fall paths through the board.
//!
//! Every non-static cell has at most one successor: the next non-static cell a
//! piece reaches when falling from it. Normally that is the cell directly
//! below; when the cell below is a teleporter entry, the piece re-emerges under
//! the paired exit. The successor relation partitions the non-static cells into
//! disjoint chains, ordered head (top) to tail (bottom).

use super::piece::{Piece, PortalRole};

#[derive(Clone, Debug, PartialEq)]
pub struct FallChains {
    /// Concatenated chains, each ordered head to tail.
    cells: Vec<usize>,
    /// `(start, len, spawns)` per chain; spawning chains start on row 0.
    spans: Vec<(usize, usize, bool)>,
    /// Positions `k` in `cells` where the step `k -> k+1` passes a teleporter.
    links: Vec<usize>,
}

impl FallChains {
    /// Returns `None` when teleporters create a cycle.
    pub fn build(width: usize, height: usize, cells: &[Piece]) -> Option<FallChains> {
        let n = width * height;
        let mut exits = [usize::MAX; 256];
        for (idx, piece) in cells.iter().enumerate() {
            if let Piece::Teleporter {
                pair,
                role: PortalRole::Exit,
            } = piece
            {
                exits[*pair as usize] = idx;
            }
        }

        const NONE: usize = usize::MAX;
        let mut succ = vec![NONE; n];
        let mut via_link = vec![false; n];
        let mut has_pred = vec![false; n];
        for idx in 0..n {
            if cells[idx].is_static() {
                continue;
            }
            let mut next = idx + width;
            let mut linked = false;
            let mut hops = 0;
            loop {
                if next >= n {
                    break;
                }
                match cells[next] {
                    Piece::Teleporter {
                        pair,
                        role: PortalRole::Entry,
                    } => {
                        let exit = exits[pair as usize];
                        hops += 1;
                        if exit == usize::MAX || hops > 256 {
                            next = n;
                            break;
                        }
                        linked = true;
                        next = exit + width;
                    }
                    p if p.is_static() => {
                        next = n;
                        break;
                    }
                    _ => break,
                }
            }
            if next < n {
                succ[idx] = next;
                via_link[idx] = linked;
                has_pred[next] = true;
            }
        }

        let mut out = FallChains {
            cells: Vec::with_capacity(n),
            spans: Vec::new(),
            links: Vec::new(),
        };
        let mut covered = 0usize;
        for head in 0..n {
            if cells[head].is_static() || has_pred[head] {
                continue;
            }
            let start = out.cells.len();
            let mut cur = head;
            loop {
                out.cells.push(cur);
                covered += 1;
                if covered > n {
                    return None;
                }
                let next = succ[cur];
                if next == NONE {
                    break;
                }
                if via_link[cur] {
                    out.links.push(out.cells.len() - 1);
                }
                cur = next;
            }
            out.spans
                .push((start, out.cells.len() - start, head < width));
        }
        let open = cells.iter().filter(|p| !p.is_static()).count();
        // cells left uncovered sit on a cycle with no head
        (covered == open).then_some(out)
    }

    /// Compacts movable pieces toward the tail of each chain. Returns the
    /// moves that crossed a teleporter.
    pub fn settle(&self, cells: &mut [Piece], teleported: &mut Vec<(usize, usize)>) {
        let mut link_iter = 0usize;
        for &(start, len, _) in &self.spans {
            let chain = &self.cells[start..start + len];
            let first_link = link_iter;
            while link_iter < self.links.len() && self.links[link_iter] < start + len {
                link_iter += 1;
            }
            let links = &self.links[first_link..link_iter];

            let mut write = len;
            for read in (0..len).rev() {
                let piece = cells[chain[read]];
                if !piece.is_movable() {
                    continue;
                }
                write -= 1;
                if write != read {
                    cells[chain[write]] = piece;
                    cells[chain[read]] = Piece::Empty;
                    let crosses = links
                        .iter()
                        .any(|&k| k >= start + read && k < start + write);
                    if crosses {
                        teleported.push((chain[read], chain[write]));
                    }
                }
            }
        }
    }

    /// Vacant cells at the top of spawning chains, deepest first per chain.
    pub fn spawn_slots<'a>(&'a self, cells: &'a [Piece]) -> impl Iterator<Item = usize> + 'a {
        self.spans
            .iter()
            .filter(|span| span.2)
            .flat_map(move |&(start, len, _)| {
                let chain = &self.cells[start..start + len];
                let vacant = chain.iter().take_while(|c| cells[**c].is_empty()).count();
                chain[..vacant].iter().rev().copied()
            })
    }

    pub fn chain_count(&self) -> usize {
        self.spans.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const E: Piece = Piece::Empty;
    const R: Piece = Piece::Color(0);
    const G: Piece = Piece::Grass;

    #[test]
    fn plain_columns_are_chains() {
        let cells = vec![E; 6];
        let chains = FallChains::build(3, 2, &cells).unwrap();
        assert_eq!(chains.chain_count(), 3);
    }

    #[test]
    fn static_cell_splits_column() {
        // 1 wide, 4 tall: R / G / E / E
        let mut cells = vec![R, G, E, E];
        let chains = FallChains::build(1, 4, &cells).unwrap();
        assert_eq!(chains.chain_count(), 2);
        let mut tele = Vec::new();
        chains.settle(&mut cells, &mut tele);
        assert_eq!(cells, vec![R, G, E, E]);
        // only the top chain spawns
        let slots: Vec<_> = chains.spawn_slots(&cells).collect();
        assert!(slots.is_empty());
    }

    #[test]
    fn teleporter_moves_pieces_across_columns() {
        // 2 wide, 3 tall. Column 0: R, E, Entry. Column 1: Exit, E, E.
        let entry = Piece::Teleporter {
            pair: 0,
            role: PortalRole::Entry,
        };
        let exit = Piece::Teleporter {
            pair: 0,
            role: PortalRole::Exit,
        };
        let mut cells = vec![R, exit, E, E, entry, E];
        let chains = FallChains::build(2, 3, &cells).unwrap();
        assert_eq!(chains.chain_count(), 1);
        let mut tele = Vec::new();
        chains.settle(&mut cells, &mut tele);
        assert_eq!(cells[5], R);
        assert_eq!(cells[0], E);
        assert_eq!(tele, vec![(0, 5)]);
        let slots: Vec<_> = chains.spawn_slots(&cells).collect();
        assert_eq!(slots, vec![3, 2, 0]);
    }

    #[test]
    fn teleporter_cycle_is_rejected() {
        // 2 wide, 2 tall; entry under each exit's column pointing back.
        let cells = vec![
            Piece::Teleporter {
                pair: 0,
                role: PortalRole::Exit,
            },
            Piece::Teleporter {
                pair: 1,
                role: PortalRole::Exit,
            },
            Piece::Teleporter {
                pair: 1,
                role: PortalRole::Entry,
            },
            Piece::Teleporter {
                pair: 0,
                role: PortalRole::Entry,
            },
        ];
        // no open cells: trivially acyclic
        assert!(FallChains::build(2, 2, &cells).is_some());
        let cells = vec![
            Piece::Teleporter {
                pair: 0,
                role: PortalRole::Exit,
            },
            Piece::Teleporter {
                pair: 1,
                role: PortalRole::Exit,
            },
            E,
            E,
            Piece::Teleporter {
                pair: 1,
                role: PortalRole::Entry,
            },
            Piece::Teleporter {
                pair: 0,
                role: PortalRole::Entry,
            },
        ];
        assert!(FallChains::build(2, 3, &cells).is_none());
    }
}
