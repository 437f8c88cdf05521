env ruby
class Person super Object ivars first last
def singleton:Person new vis public sig 1 body (call (arg 0) (super))
def Person set_name vis public sig 1 opt first="" body (seq (ivset first (arg 1)) (ivset last (arg 0)))
def Person full_name vis public sig 0 body (concat (ivar first) (concat " " (ivar last)))
stcallruby Person @ruby1:new: blockv (block 1 (seq (csend "@ruby1:set_name:_:" (arg 0) "Doe" "John") (arg 0)))
send @lastresult full_name
expect "John Doe"
