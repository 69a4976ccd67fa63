"""plado: a (1+eps)-stretch vertex-to-label distance oracle for undirected
edge-weighted planar graphs, with an exact brute-force reference, a text
graph format, and a CLI (gen / build / query / relabel / verify / bench /
stats)."""

__version__ = "0.1.0"

from .backends import HAS_NUMBA, USE_NUMBA, backend_name
from .decomposition import (
    Piece,
    Rgd,
    Separator,
    SeparatorPath,
    ancestors,
    build_rgd,
    choose_separator,
    classify_sides,
    fundamental_cycle,
    lca,
)
from .errors import (
    BadIndex,
    BadRange,
    CorruptOracleFile,
    Disconnected,
    DuplicateEdge,
    EdgeInTree,
    EmbeddingInconsistent,
    EulerViolation,
    InconsistentEmbedding,
    LabelAbsent,
    MalformedLine,
    NoBalancedEdge,
    PladoError,
    VerificationFailed,
)
from .graph import (
    Edge,
    PlanarGraph,
    gen_grid,
    gen_planar,
    parse_graph,
    serialize_graph,
    triangulate,
    validate_faces,
)
from .index import (
    MODE_BINARY,
    MODE_BITVECTOR,
    LabelIndex,
    LabelPathIndex,
    RankBitvector,
    SparseTableRMQ,
    build_label_index,
    bv_rank,
    locate_split,
    rmq_query,
)
from .oracle import (
    Oracle,
    OracleConfig,
    QueryResult,
    QueryStats,
    RelabelReport,
    SpaceReport,
)
from .portals import (
    Portal,
    THREE_STRETCH_EPS,
    VertexPortalTables,
    build_vertex_tables,
    portal_count_limit,
    project,
    select_portals,
    verify_distance_property,
)
from .shortest_paths import (
    DistanceMap,
    Spt,
    exact_label_distance,
    find_center,
    sssp,
    weighted_eccentricity,
)

__all__ = [name for name in dir() if not name.startswith("_")]
