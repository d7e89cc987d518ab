//! Right-angled Artin groups acting by Hamiltonian twists on the disk.

pub mod graphs;
pub mod raagwords;
pub mod twistcore;
pub mod hyperlift;
pub mod dynver;
