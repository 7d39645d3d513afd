from pie_balanced_cut.partition_agent_nodes.damage_control_node import damage_control_step
from pie_balanced_cut.partition_agent_nodes.final_partition_node import combine, final_rounding
from pie_balanced_cut.partition_agent_nodes.heavy_vertices_node import heavy_vertices
from pie_balanced_cut.partition_agent_nodes.long_edges_node import long_edges
from pie_balanced_cut.partition_agent_nodes.solve_sdp_node import solve_sdp

__all__ = ["solve_sdp", "long_edges", "heavy_vertices", "damage_control_step", "final_rounding", "combine"]
