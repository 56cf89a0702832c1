use std::fmt;

macro_rules! index_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub(crate) u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }

            pub(crate) fn from_index(index: usize) -> Self {
                Self(u32::try_from(index).expect("index overflow"))
            }
        }
    };
}

index_newtype!(
    /// Index of a place. Places are numbered in lexicographic order of their names.
    PlaceId
);
index_newtype!(
    /// Index of a transition, lexicographic by name.
    TransitionId
);
index_newtype!(
    /// Index of a base (token), lexicographic by name.
    BaseId
);
index_newtype!(TypeId);

/// An undirected bond between two distinct bases.
///
/// Endpoints are stored in ascending order so that `(a,b)` and `(b,a)` compare equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bond {
    lo: BaseId,
    hi: BaseId,
}

impl Bond {
    /// Returns `None` when both endpoints are the same base.
    pub fn new(a: BaseId, b: BaseId) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Self { lo: a, hi: b }),
            std::cmp::Ordering::Greater => Some(Self { lo: b, hi: a }),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn endpoints(self) -> (BaseId, BaseId) {
        (self.lo, self.hi)
    }

    pub fn touches(self, base: BaseId) -> bool {
        self.lo == base || self.hi == base
    }

    /// The endpoint opposite to `base`, if `base` is an endpoint.
    pub fn other(self, base: BaseId) -> Option<BaseId> {
        if self.lo == base {
            Some(self.hi)
        } else if self.hi == base {
            Some(self.lo)
        } else {
            None
        }
    }
}

impl fmt::Display for Bond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}~{})", self.lo.0, self.hi.0)
    }
}
