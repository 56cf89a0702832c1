//! Net structure, markings, histories and well-formedness checks.

mod ids;
mod net;
mod state;
mod validate;

pub use ids::{BaseId, Bond, PlaceId, TransitionId, TypeId};
pub use net::{
    tokens_of, ArcElement, ArcLabel, Base, BuildError, ElemSpec, Net, NetBuilder, TokenType, TokenValue, Transition,
    TransitionSpec, ValueKind,
};
pub use state::{Contents, History, Marking, State};
pub use validate::{validate, Violation};
