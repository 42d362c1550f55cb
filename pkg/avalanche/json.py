import json as stdjson
from os import path
from typing import Any, Dict, List, NamedTuple, Optional, Union

from jsonschema import Draft7Validator, RefResolver, ValidationError

from avalanche.catspaces import H3Point, MetricTree, H3
from avalanche.chains import Chain, GoodPair
from avalanche.cocycle import MatChain
from avalanche.config import ConfigurationError
from avalanche.error import GeometryError
from avalanche.hyp2 import HPoint, Mat2, H2


def _schema() -> Dict[str, Any]:
    with open(path.join(path.dirname(__file__), 'assets', 'schema.json'), encoding='utf-8') as f:
        return stdjson.loads(f.read())


def validate(data: Any, schema_definition: str) -> None:
    """
    Validate a document against a definition from the schema.

    Raises
    ------
    avalanche.config.ConfigurationError
    """
    schema = _schema()
    try:
        Draft7Validator(schema['definitions'][schema_definition], resolver=RefResolver.from_schema(schema)).validate(data)
    except ValidationError as e:
        location = '/'.join(str(part) for part in e.absolute_path)
        raise ConfigurationError('Invalid %s document at "/%s": %s' % (schema_definition, location, e.message))


class JSONEncoder(stdjson.JSONEncoder):
    def __init__(self, *args, **kwargs):
        stdjson.JSONEncoder.__init__(self, *args, **kwargs)
        self._mappers = {
            HPoint: self._encode_h_point,
            H3Point: self._encode_h3_point,
            Mat2: self._encode_mat2,
            GoodPair: self._encode_pair,
            Chain: self._encode_chain,
            MetricTree: self._encode_tree,
            MatChain: self._encode_mat_chain,
        }

    def default(self, o):
        for mapper_type in self._mappers:
            if isinstance(o, mapper_type):
                return self._mappers[mapper_type](o)
        return stdjson.JSONEncoder.default(self, o)

    def _encode_schema(self, encoded: Dict, definition: str) -> None:
        encoded['$schema'] = 'schema.json#/definitions/%s' % definition

    def _encode_h_point(self, point: HPoint) -> List:
        return [point.re, point.im]

    def _encode_h3_point(self, point: H3Point) -> List:
        return [point.x, point.y, point.z]

    def _encode_mat2(self, matrix: Mat2) -> List:
        return list(matrix.entries)

    def _encode_pair(self, pair: GoodPair) -> Dict:
        return {
            'a': pair.a,
            'b': pair.b,
            'translation': pair.translation,
            'curvatureAngle': pair.curvature_angle,
        }

    def _encode_chain(self, chain: Chain) -> Dict:
        encoded: Dict[str, Any] = {}
        self._encode_schema(encoded, 'chain')
        encoded['model'] = chain.space.name
        if isinstance(chain.space, MetricTree):
            encoded['tree'] = chain.space
        encoded['points'] = list(chain.points)
        return encoded

    def _encode_tree(self, tree: MetricTree) -> Dict:
        encoded: Dict[str, Any] = {}
        self._encode_schema(encoded, 'tree')
        encoded['nodes'] = list(tree.nodes)
        encoded['edges'] = [[u, v, length] for u, v, length in tree.edges]
        return encoded

    def _encode_mat_chain(self, chain: MatChain) -> Dict:
        encoded: Dict[str, Any] = {}
        self._encode_schema(encoded, 'matChain')
        encoded['mats'] = list(chain.mats)
        return encoded


def dumps(o: Any, pair: Optional[GoodPair] = None) -> str:
    """
    Dump a value to JSON, adding the good pair it was drawn for, if any.
    """
    if pair is not None:
        encoded = stdjson.loads(stdjson.dumps(o, cls=JSONEncoder))
        encoded['pair'] = pair
        o = encoded
    return stdjson.dumps(o, cls=JSONEncoder)


class ChainDocument(NamedTuple):
    chain: Chain
    pair: Optional[GoodPair]


class MatChainDocument(NamedTuple):
    mat_chain: MatChain
    pair: Optional[GoodPair]


Document = Union[ChainDocument, MatChainDocument]


def _load_domain(definition: str, loader: Any, *args: Any) -> Any:
    try:
        return loader(*args)
    except GeometryError as e:
        raise ConfigurationError('Invalid %s document: %s' % (definition, e))


def _load_pair(data: Any) -> Optional[GoodPair]:
    if 'pair' not in data:
        return None
    return _load_domain('pair', GoodPair, data['pair']['a'], data['pair']['b'])


def load_tree(data: Any) -> MetricTree:
    validate(data, 'tree')
    return _load_domain('tree', MetricTree, data['nodes'], [tuple(edge) for edge in data['edges']])


def load_chain_document(data: Any) -> ChainDocument:
    """
    Load a chain document, with the good pair it declares, if any.

    Raises
    ------
    avalanche.config.ConfigurationError
    """
    validate(data, 'chain')
    model = data['model']
    if model == 'H2':
        chain = _load_domain('chain', lambda: Chain([HPoint(re, im) for re, im in data['points']], H2))
    elif model == 'H3':
        chain = _load_domain('chain', lambda: Chain([H3Point(x, y, z) for x, y, z in data['points']], H3))
    else:
        tree = load_tree(data['tree'])
        chain = _load_domain('chain', Chain, data['points'], tree)
    return ChainDocument(chain, _load_pair(data))


def load_chain(data: Any) -> Chain:
    return load_chain_document(data).chain


def load_mat_chain_document(data: Any) -> MatChainDocument:
    """
    Load a matrix chain document, with the good pair it declares, if any.

    Raises
    ------
    avalanche.config.ConfigurationError
    """
    validate(data, 'matChain')
    mat_chain = _load_domain('matChain', lambda: MatChain([Mat2(a, b, c, d) for a, b, c, d in data['mats']]))
    return MatChainDocument(mat_chain, _load_pair(data))


def load_mat_chain(data: Any) -> MatChain:
    return load_mat_chain_document(data).mat_chain


def load_document(data: Any) -> Document:
    """
    Load either a chain document or, if it lists matrices, a matrix chain document.

    Raises
    ------
    avalanche.config.ConfigurationError
    """
    if isinstance(data, dict) and 'mats' in data:
        return load_mat_chain_document(data)
    return load_chain_document(data)
