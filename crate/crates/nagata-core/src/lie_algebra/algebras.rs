//! Built-in algebras, loaded from the text files shipped in `data/`.

use super::{LieAlgebra, LieError};

pub const HEIS3: &str = include_str!("../../data/heis3.lie");
pub const FILIFORM4: &str = include_str!("../../data/filiform4.lie");
pub const SL2: &str = include_str!("../../data/sl2.lie");
pub const SO3: &str = include_str!("../../data/so3.lie");
pub const SOL3: &str = include_str!("../../data/sol3.lie");

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: &[&str] = &["heis3", "filiform4", "sl2", "so3", "sol3", "abelianN"];

pub fn heis3() -> LieAlgebra {
    LieAlgebra::parse(HEIS3).expect("bundled heis3")
}

pub fn filiform4() -> LieAlgebra {
    LieAlgebra::parse(FILIFORM4).expect("bundled filiform4")
}

pub fn sl2() -> LieAlgebra {
    LieAlgebra::parse(SL2).expect("bundled sl2")
}

pub fn so3() -> LieAlgebra {
    LieAlgebra::parse(SO3).expect("bundled so3")
}

pub fn sol3() -> LieAlgebra {
    LieAlgebra::parse(SOL3).expect("bundled sol3")
}

pub fn abelian(n: usize) -> Result<LieAlgebra, LieError> {
    LieAlgebra::from_entries(format!("abelian{n}"), n, &[])
}

/// Look up a built-in algebra; `abelian3` and friends give abelian algebras.
pub fn builtin(name: &str) -> Option<LieAlgebra> {
    match name {
        "heis3" => Some(heis3()),
        "filiform4" => Some(filiform4()),
        "sl2" => Some(sl2()),
        "so3" => Some(so3()),
        "sol3" => Some(sol3()),
        _ => {
            let n: usize = name.strip_prefix("abelian")?.parse().ok()?;
            abelian(n).ok()
        }
    }
}
