# tests/test_query_frontend.py
import pytest
from query import (MissingParameter, QuerySyntaxError, TypeMismatch, UnboundVariable, UnsupportedConstruct, bind,
                   format_query, parse)
from query.query_ast import FunctionCall, In, Match, Parameter, Return, Where, With
from core.sampler import (EDGE_METADATA_QUERY, NODE_METADATA_QUERY, ONE_HOP_TEMPLATE, TWO_HOP_TEMPLATE)
CITED_PAPERS_QUERY = "MATCH (n:PAPER)-[:CITES]->(m:PAPER) RETURN DISTINCT m"
CORPUS = [NODE_METADATA_QUERY, EDGE_METADATA_QUERY, TWO_HOP_TEMPLATE, ONE_HOP_TEMPLATE, CITED_PAPERS_QUERY]
TWO_HOP_PARAMS = {'SEED_NODES': ['a'], 'MAX_NEIGHBOURS': 5, 'NODE_TYPE': 'PAPER', 'REL_TYPE': 'CITES'}
class TestParse:
    def test_two_hop_template_shape(self):
        ast = parse(TWO_HOP_TEMPLATE)
        kinds = [type(c) for c in ast.clauses]
        assert kinds == [Match, Where, Match, With, Return]
        first, where, optional, with_clause, ret = ast.clauses
        assert not first.optional and optional.optional
        assert isinstance(where.expr, In) and where.expr.container == Parameter('SEED_NODES')
        assert len(optional.pattern.nodes) == 3 and len(optional.pattern.rels) == 2
        assert optional.pattern.rels[0].rel_type == Parameter('REL_TYPE')
        assert with_clause.order_by[0].expr == FunctionCall('rand')
        assert with_clause.limit == Parameter('MAX_NEIGHBOURS')
        assert len(ret.items) == 5
        assert ret.items[0].alias == 'src_id'
    def test_anonymous_edge_and_distinct(self):
        ast = parse(CITED_PAPERS_QUERY)
        match, ret = ast.clauses
        rel = match.pattern.rels[0]
        assert rel.variable is None and rel.rel_type == 'CITES' and rel.direction == 'out'
        assert ret.distinct
    def test_keywords_are_case_insensitive(self):
        assert parse("match (n:PAPER) return n") == parse("MATCH (n:PAPER) RETURN n")
    def test_unclosed_pattern(self):
        with pytest.raises(QuerySyntaxError) as info:
            parse("MATCH (n RETURN n")
        assert info.value.line == 1
        assert info.value.column >= 9
        assert "')'" in info.value.expected
    @pytest.mark.parametrize('text', [
        "MATCH (n) DELETE n",
        "CREATE (n:PAPER)",
        "MATCH (n)-[*1..3]->(m) RETURN m",
        "MATCH (n) RETURN n SKIP 3",
    ])
    def test_constructs_outside_the_subset(self, text):
        with pytest.raises(QuerySyntaxError):
            parse(text)
    @pytest.mark.parametrize('text', CORPUS)
    def test_print_parse_round_trip(self, text):
        ast = parse(text)
        assert parse(format_query(ast)) == ast
class TestBind:
    def test_two_hop_params_bind(self):
        bound = bind(parse(TWO_HOP_TEMPLATE), TWO_HOP_PARAMS)
        assert bound.columns == ('src_id', 'node_1.id', 'node_1.features', 'node_2.id', 'node_2.features')
        # schema parameters are substituted into the patterns
        optional = bound.ast.clauses[2]
        assert optional.pattern.nodes[1].labels == ('PAPER',)
        assert optional.pattern.rels[0].rel_type == 'CITES'
    def test_missing_limit_parameter(self):
        params = dict(TWO_HOP_PARAMS)
        del params['MAX_NEIGHBOURS']
        with pytest.raises(MissingParameter) as info:
            bind(parse(TWO_HOP_TEMPLATE), params)
        assert info.value.name == 'MAX_NEIGHBOURS'
    @pytest.mark.parametrize('value', [-1, 2.5, '5', True])
    def test_limit_must_be_a_count(self, value):
        with pytest.raises(TypeMismatch):
            bind(parse(TWO_HOP_TEMPLATE), dict(TWO_HOP_PARAMS, MAX_NEIGHBOURS=value))
    def test_in_needs_a_list(self):
        with pytest.raises(TypeMismatch):
            bind(parse(TWO_HOP_TEMPLATE), dict(TWO_HOP_PARAMS, SEED_NODES='a'))
    def test_label_parameter_must_be_a_name(self):
        with pytest.raises(TypeMismatch):
            bind(parse(TWO_HOP_TEMPLATE), dict(TWO_HOP_PARAMS, NODE_TYPE=3))
    def test_unbound_variable(self):
        with pytest.raises(UnboundVariable):
            bind(parse("MATCH (n:PAPER) RETURN m"), {})
    def test_with_narrows_scope(self):
        with pytest.raises(UnboundVariable):
            bind(parse("MATCH (n)-[r]->(m) WITH n RETURN m"), {})
    def test_query_must_end_with_return(self):
        with pytest.raises(UnsupportedConstruct):
            bind(parse("MATCH (n:PAPER)"), {})
    def test_dollar_prefixed_keys_accepted(self):
        bound = bind(parse("MATCH (n:PAPER) WHERE n.id IN $ids RETURN n.id"), {'$ids': ['a']})
        assert bound.params['ids'] == ['a']
