import logging
from app.errors import InvalidGraph
from app.group.graphs import rooted_ball, validate
from app.group.preactions import SaturationBuilder

logger = logging.getLogger("Dynamics")


def perfect_kernel_member(params, g):
    """
    A finitely generated subgroup lies in the perfect kernel iff its
    (m,n)-graph misses some degree cap, since saturating it then grafts an
    infinite forest.
    """
    report = validate(params, g)
    if not report.valid:
        raise InvalidGraph("graph violates degree caps or the Transfer Equation")
    if not report.connected:
        raise InvalidGraph("graph is not connected")
    return not report.saturated


def conjugate_ball(params, a, word, radius):
    """Rooted ball of radius R around p(x.w) in the maximal forest saturation of `a`."""
    builder = SaturationBuilder(params, a)
    point = builder.apply(a.basepoint, word)
    builder.fill_ball(point.orbit, radius)
    return rooted_ball(builder.graph(root=point.orbit), point.orbit, radius)
