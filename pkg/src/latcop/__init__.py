"""Coproduct analysis for finitely generated quasivarieties of
distributive-lattice-based finite algebras.

The library decides whether the forgetful functor into bounded distributive
lattices preserves coproducts (and the finer E/S classification), builds
multisorted piggyback dualities, computes coproducts of finite algebras via
the natural hom-functors, and recovers Priestley duals from natural duals.
"""

__version__ = "0.1.0"

from .algebra import (
    Congruence,
    FiniteAlgebra,
    Homomorphism,
    Signature,
    Term,
    app,
    congruence_generated,
    direct_product,
    embeds,
    eval_term,
    free_algebra,
    hom_enumerate,
    in_isp,
    induced_subalgebra,
    is_rel_subdirectly_irreducible,
    isomorphic,
    quotient,
    relative_congruences,
    subuniverse_closure,
    subuniverses,
    var,
)
from .catalog import CatalogEntry, make, make_id, table1_suite
from .classify import (
    ClassificationReport,
    check_condition_C,
    find_single_generator,
    flowchart_classify,
    simplify_generators,
)
from .distlat import (
    DReductSpec,
    DistLatticeReduct,
    FinitePoset,
    LatticeHom,
    PosetMap,
    PrimeFilter,
    d_reduct,
    dual_of_hom,
    poset_isomorphic,
    prime_filters,
    priestley_dual,
    upset_lattice,
)
from .duality import (
    AlterEgo,
    CoproductResult,
    IotaCheck,
    MultisortedStructure,
    coproduct,
    e_functor,
    evaluation_check,
    iota_check,
    lambda_map,
    natural_dual,
    reflector,
    reveng_priestley,
    structure_product,
)
from .errors import (
    CapExceeded,
    IncompatiblePartition,
    LatcopError,
    LatticeAxiomError,
    MembershipError,
    ParseError,
    SeparationError,
    SignatureMismatch,
)
from .piggyback import (
    CarrierMap,
    SortedRelation,
    build_alter_ego,
    carrier_from_filter,
    carriers_of,
    leq_sublattice,
    maximal_subuniverses_in,
    minimal_omega,
    minimal_omega_certified,
    relation_orbit_count,
    sep_condition,
    unique_max_applicable,
)
