from events import Events

class ButterflyEvents(Events):
    __events__ = ( "leaf_compressed", "blocks_merged", "block_finalised", "plan_built" )
