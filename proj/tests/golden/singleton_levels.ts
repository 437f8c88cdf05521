env ruby
class Person super Object ivars name
send Person new
singleton @lastresult
inspect hierarchy @lastresult
fuzz lookup 50
